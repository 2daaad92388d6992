//! The quantities a dispatching rule can observe about one candidate operation.

/// Identifier usable in a rule expression.
///
/// Every variant maps to one field of [`FeatureVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Feature {
    /// Processing time of the candidate operation.
    Pt,
    /// Total work of the job: sum of processing times over its whole route.
    Twk,
    /// Work remaining including the candidate.
    Twkr,
    /// Work remaining excluding the candidate (`TWKR - PT`).
    Srm,
    /// Count of remaining operations including the candidate.
    NopsRemaining,
    /// Processing time of the operation right after the candidate, 0 if last.
    Sso,
    /// Maximum processing time among operations after the candidate, 0 if last.
    Lso,
    /// Arrival time of the job.
    Arrival,
    /// Time the job has been waiting since it became ready.
    Wait,
    /// Current simulation time.
    Now,
    /// Uniform draw from `[0, 1)`, fresh per candidate per decision point.
    Rand,
}

pub const ALL_FEATURES: [Feature; 11] = [
    Feature::Pt,
    Feature::Twk,
    Feature::Twkr,
    Feature::Srm,
    Feature::NopsRemaining,
    Feature::Sso,
    Feature::Lso,
    Feature::Arrival,
    Feature::Wait,
    Feature::Now,
    Feature::Rand,
];

impl Feature {
    pub fn name(self) -> &'static str {
        match self {
            Feature::Pt => "PT",
            Feature::Twk => "TWK",
            Feature::Twkr => "TWKR",
            Feature::Srm => "SRM",
            Feature::NopsRemaining => "NOPS_REMAINING",
            Feature::Sso => "SSO",
            Feature::Lso => "LSO",
            Feature::Arrival => "ARRIVAL",
            Feature::Wait => "WAIT",
            Feature::Now => "NOW",
            Feature::Rand => "RAND",
        }
    }

    /// Case-insensitive lookup by identifier name.
    pub fn from_name(name: &str) -> Option<Feature> {
        ALL_FEATURES
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

/// Snapshot of one candidate operation at one decision point, as seen by a rule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    pub pt: f64,
    pub twk: f64,
    pub twkr: f64,
    pub srm: f64,
    pub nops_remaining: f64,
    pub sso: f64,
    pub lso: f64,
    pub arrival: f64,
    pub wait: f64,
    pub now: f64,
    pub rand: f64,
}

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> f64 {
        match feature {
            Feature::Pt => self.pt,
            Feature::Twk => self.twk,
            Feature::Twkr => self.twkr,
            Feature::Srm => self.srm,
            Feature::NopsRemaining => self.nops_remaining,
            Feature::Sso => self.sso,
            Feature::Lso => self.lso,
            Feature::Arrival => self.arrival,
            Feature::Wait => self.wait,
            Feature::Now => self.now,
            Feature::Rand => self.rand,
        }
    }
}
