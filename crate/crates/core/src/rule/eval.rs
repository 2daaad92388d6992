//! Guarded rule evaluation.

use alloc::string::String;

use super::ast::{BinOp, Expr, Func};
use super::RuleProgram;
use crate::features::FeatureVector;

/// The rule produced a non-finite score for this candidate.
///
/// Guards keep division by zero and out-of-domain `log`/`sqrt` finite, so
/// this only fires on genuine overflow (or a NaN bred from infinities).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("rule `{rule}` produced non-finite score {score} on {fv:?}")]
pub struct RuleEvalError {
    pub rule: String,
    pub score: f64,
    pub fv: FeatureVector,
}

fn eval_expr(expr: &Expr, fv: &FeatureVector) -> f64 {
    match expr {
        Expr::Num(v) => *v,
        Expr::Feature(f) => fv.get(*f),
        Expr::Neg(inner) => -eval_expr(inner, fv),
        Expr::Bin(op, lhs, rhs) => {
            let l = eval_expr(lhs, fv);
            let r = eval_expr(rhs, fv);
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        l
                    } else {
                        l / r
                    }
                }
            }
        }
        Expr::Call(func, args) => match func {
            Func::Min => {
                let a = eval_expr(&args[0], fv);
                let b = eval_expr(&args[1], fv);
                if a <= b {
                    a
                } else {
                    b
                }
            }
            Func::Max => {
                let a = eval_expr(&args[0], fv);
                let b = eval_expr(&args[1], fv);
                if a >= b {
                    a
                } else {
                    b
                }
            }
            Func::Abs => {
                let a = eval_expr(&args[0], fv);
                if a < 0.0 {
                    -a
                } else {
                    a
                }
            }
            Func::Sqrt => {
                let a = eval_expr(&args[0], fv);
                if a < 0.0 {
                    0.0
                } else {
                    libm::sqrt(a)
                }
            }
            Func::Log => {
                let a = eval_expr(&args[0], fv);
                if a <= 0.0 {
                    0.0
                } else {
                    libm::log(a)
                }
            }
            Func::Exp => libm::exp(eval_expr(&args[0], fv)),
        },
    }
}

/// Scores one candidate; higher means dispatch sooner.
///
/// Division by zero divides by one instead, `log` of a non-positive value and
/// `sqrt` of a negative value are 0. A non-finite final score is the only
/// error.
pub fn eval_rule(rule: &RuleProgram, fv: &FeatureVector) -> Result<f64, RuleEvalError> {
    let score = eval_expr(&rule.ast, fv);
    if score.is_finite() {
        Ok(score)
    } else {
        Err(RuleEvalError {
            rule: rule.source.clone(),
            score,
            fv: *fv,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::parse_rule;

    fn fv() -> FeatureVector {
        FeatureVector {
            pt: 5.0,
            twk: 17.0,
            twkr: 17.0,
            srm: 12.0,
            nops_remaining: 3.0,
            sso: 3.0,
            lso: 9.0,
            arrival: 0.0,
            wait: 2.0,
            now: 12.0,
            rand: 0.25,
        }
    }

    fn eval(source: &str, fv: &FeatureVector) -> f64 {
        eval_rule(&parse_rule(source).unwrap(), fv).unwrap()
    }

    #[test]
    fn negates_processing_time() {
        let mut v = fv();
        v.pt = 7.0;
        assert_eq!(eval("-PT", &v), -7.0);
    }

    #[test]
    fn division_by_zero_divides_by_one() {
        let mut v = fv();
        v.pt = 4.0;
        v.lso = 0.0;
        assert_eq!(eval("-(PT/LSO)", &v), -4.0);
    }

    #[test]
    fn evaluates_ratio() {
        let got = eval("-(PT/TWKR)", &fv());
        assert!((got - (-5.0 / 17.0)).abs() < 1e-12, "{got}");
    }

    #[test]
    fn log_guard_returns_zero() {
        let mut v = fv();
        v.arrival = 0.0;
        assert_eq!(eval("log(ARRIVAL)", &v), 0.0);
        assert_eq!(eval("log(ARRIVAL - 5)", &v), 0.0);
    }

    #[test]
    fn sqrt_guard_returns_zero() {
        assert_eq!(eval("sqrt(0 - 9)", &fv()), 0.0);
        assert_eq!(eval("sqrt(LSO)", &fv()), 3.0);
    }

    #[test]
    fn min_max_abs() {
        assert_eq!(eval("min(PT, SSO)", &fv()), 3.0);
        assert_eq!(eval("max(PT, SSO)", &fv()), 5.0);
        assert_eq!(eval("abs(SSO - PT)", &fv()), 2.0);
    }

    #[test]
    fn overflow_is_an_error() {
        let err = eval_rule(&parse_rule("exp(1e9)").unwrap(), &fv()).unwrap_err();
        assert!(err.score.is_infinite());
        assert_eq!(err.rule, "exp(1e9)");
    }

    #[test]
    fn rand_feature_reads_vector() {
        assert_eq!(eval("RAND", &fv()), 0.25);
    }
}
