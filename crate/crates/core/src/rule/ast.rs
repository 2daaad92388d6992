//! Expression trees and their canonical rendering.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::features::Feature;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Min,
    Max,
    Abs,
    Sqrt,
    Log,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Exp => "exp",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            Func::Abs | Func::Sqrt | Func::Log | Func::Exp => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        [Func::Min, Func::Max, Func::Abs, Func::Sqrt, Func::Log, Func::Exp]
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

/// A rule expression. Literals are finite and non-negative; negative values
/// are spelled with unary minus.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Feature(Feature),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Num(_) | Expr::Feature(_) | Expr::Call(..) => 4,
    }
}

impl Expr {
    /// Renders the tree with the fewest parentheses that still reparse to the
    /// identical tree (binary operators are left-associative, so same-level
    /// right operands keep theirs).
    pub fn print(&self) -> String {
        let mut out = String::new();
        self.print_into(&mut out);
        out
    }

    fn print_into(&self, out: &mut String) {
        match self {
            Expr::Num(v) => out.push_str(&format!("{v}")),
            Expr::Feature(f) => out.push_str(f.name()),
            Expr::Neg(inner) => {
                out.push('-');
                if precedence(inner) < 3 {
                    out.push('(');
                    inner.print_into(out);
                    out.push(')');
                } else {
                    inner.print_into(out);
                }
            }
            Expr::Bin(op, lhs, rhs) => {
                let level = precedence(self);
                if precedence(lhs) < level {
                    out.push('(');
                    lhs.print_into(out);
                    out.push(')');
                } else {
                    lhs.print_into(out);
                }
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                if precedence(rhs) <= level {
                    out.push('(');
                    rhs.print_into(out);
                    out.push(')');
                } else {
                    rhs.print_into(out);
                }
            }
            Expr::Call(func, args) => {
                out.push_str(func.name());
                out.push('(');
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    arg.print_into(out);
                }
                out.push(')');
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        let mut count = 0;
        self.visit(&mut |_| count += 1);
        count
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Feature(_) => {}
            Expr::Neg(inner) => inner.visit(f),
            Expr::Bin(_, lhs, rhs) => {
                lhs.visit(f);
                rhs.visit(f);
            }
            Expr::Call(_, args) => {
                for arg in args {
                    arg.visit(f);
                }
            }
        }
    }

    /// Clone of the `index`-th node in preorder.
    pub fn node_at(&self, index: usize) -> Option<Expr> {
        let mut remaining = index;
        let mut found = None;
        self.visit(&mut |node| {
            if found.is_none() {
                if remaining == 0 {
                    found = Some(node.clone());
                }
                remaining = remaining.wrapping_sub(1);
            }
        });
        found
    }

    /// Copy of the tree with the `index`-th preorder node replaced.
    pub fn with_node_replaced(&self, index: usize, replacement: &Expr) -> Expr {
        fn go(node: &Expr, counter: &mut usize, target: usize, replacement: &Expr) -> Expr {
            let here = *counter;
            *counter += 1;
            if here == target {
                return replacement.clone();
            }
            match node {
                Expr::Num(_) | Expr::Feature(_) => node.clone(),
                Expr::Neg(inner) => Expr::Neg(Box::new(go(inner, counter, target, replacement))),
                Expr::Bin(op, lhs, rhs) => {
                    let l = go(lhs, counter, target, replacement);
                    let r = go(rhs, counter, target, replacement);
                    Expr::Bin(*op, Box::new(l), Box::new(r))
                }
                Expr::Call(func, args) => Expr::Call(
                    *func,
                    args.iter().map(|a| go(a, counter, target, replacement)).collect(),
                ),
            }
        }
        let mut counter = 0;
        go(self, &mut counter, index, replacement)
    }
}
