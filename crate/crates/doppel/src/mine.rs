//! Geometric filtering rules that label candidate matched pairs as confident
//! negatives (doppelgangers), confident positives (true matches), or unknown,
//! from camera geotag geometry alone.
//!
//! The rules run in a fixed order: an inlier-count gate, then the distant
//! rule, then a case analysis on where the viewing rays meet, then the
//! positive rule. Exactly one rule fires per pair.

use std::collections::{BTreeMap, HashMap};

use crate::geom::{
    camera_distance, camera_from_geotag, classify_ray_relation, diagonal_fov, ecef_to_wgs84,
    frustum_overlap, view_angle, wgs84_to_ecef, GeoCamera, Geodetic, GeomError, PosedCamera,
    RayCase,
};
use rayon::prelude::*;

/// Errors from pair labeling and dataset mining.
#[derive(Debug, thiserror::Error)]
pub enum MineError {
    #[error("cameras are posed in different local frames")]
    FrameMismatch,
    #[error("invalid mining config: {0}")]
    InvalidConfig(String),
    #[error("candidate references unknown camera id {0:?}")]
    UnknownCameraId(String),
    #[error("duplicate camera id {0:?} in dataset")]
    DuplicateCameraId(String),
    #[error("candidate pair ids must differ, got {0:?} twice")]
    SelfPair(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Thresholds for the mining rules. Defaults suit site-scale captures where
/// cameras keep a modest distance from the scene of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct MiningConfig {
    /// Pairs farther apart than this are negatives outright, meters.
    pub distant_threshold_m: f64,
    /// Front-front pairs with a view angle above this are negatives, degrees.
    pub max_front_angle_deg: f64,
    /// Positive rule: maximum camera separation, meters.
    pub near_positive_distance_m: f64,
    /// Positive rule: maximum view angle, degrees.
    pub max_positive_angle_deg: f64,
    /// Candidates with fewer verified inliers than this are left unknown.
    pub min_candidate_inliers: u32,
    /// Frustum clip planes used by the overlap tests, meters.
    pub frustum_near_m: f64,
    pub frustum_far_m: f64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            distant_threshold_m: 150.0,
            max_front_angle_deg: 160.0,
            near_positive_distance_m: 15.0,
            max_positive_angle_deg: 45.0,
            min_candidate_inliers: 15,
            frustum_near_m: 0.5,
            frustum_far_m: 200.0,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<(), MineError> {
        let positive = [
            ("distant_threshold_m", self.distant_threshold_m),
            ("near_positive_distance_m", self.near_positive_distance_m),
            ("frustum_near_m", self.frustum_near_m),
            ("frustum_far_m", self.frustum_far_m),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(MineError::InvalidConfig(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if !(90.0 < self.max_front_angle_deg && self.max_front_angle_deg < 180.0) {
            return Err(MineError::InvalidConfig(format!(
                "max_front_angle_deg must lie in (90, 180), got {}",
                self.max_front_angle_deg
            )));
        }
        if !(0.0 < self.max_positive_angle_deg && self.max_positive_angle_deg <= 90.0) {
            return Err(MineError::InvalidConfig(format!(
                "max_positive_angle_deg must lie in (0, 90], got {}",
                self.max_positive_angle_deg
            )));
        }
        if self.frustum_near_m >= self.frustum_far_m {
            return Err(MineError::InvalidConfig(format!(
                "frustum_near_m {} must be below frustum_far_m {}",
                self.frustum_near_m, self.frustum_far_m
            )));
        }
        Ok(())
    }
}

/// A candidate matched pair from feature matching, stored unordered with the
/// smaller id first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchCandidate {
    id_a: String,
    id_b: String,
    /// Geometrically verified feature-match count, when known.
    pub num_inliers: Option<u32>,
}

impl MatchCandidate {
    pub fn new(x: impl Into<String>, y: impl Into<String>, num_inliers: Option<u32>) -> Result<Self, MineError> {
        let x = x.into();
        let y = y.into();
        if x == y {
            return Err(MineError::SelfPair(x));
        }
        let (id_a, id_b) = if x < y { (x, y) } else { (y, x) };
        Ok(Self {
            id_a,
            id_b,
            num_inliers,
        })
    }

    pub fn id_a(&self) -> &str {
        &self.id_a
    }

    pub fn id_b(&self) -> &str {
        &self.id_b
    }
}

/// Final call on a candidate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Negative,
    Positive,
    Unknown,
}

/// The rule that decided a pair. Each rule implies its verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Distant,
    FrontFrontWideAngle,
    BehindBehindOverFov,
    MixedNoFrustumOverlap,
    PositiveNearbyConverging,
    Indeterminate,
}

impl Rule {
    pub fn verdict(self) -> Verdict {
        match self {
            Rule::Distant
            | Rule::FrontFrontWideAngle
            | Rule::BehindBehindOverFov
            | Rule::MixedNoFrustumOverlap => Verdict::Negative,
            Rule::PositiveNearbyConverging => Verdict::Positive,
            Rule::Indeterminate => Verdict::Unknown,
        }
    }

    pub const ALL: [Rule; 6] = [
        Rule::Distant,
        Rule::FrontFrontWideAngle,
        Rule::BehindBehindOverFov,
        Rule::MixedNoFrustumOverlap,
        Rule::PositiveNearbyConverging,
        Rule::Indeterminate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Distant => "distant",
            Rule::FrontFrontWideAngle => "front-front-wide-angle",
            Rule::BehindBehindOverFov => "behind-behind-over-fov",
            Rule::MixedNoFrustumOverlap => "mixed-no-frustum-overlap",
            Rule::PositiveNearbyConverging => "positive-nearby-converging",
            Rule::Indeterminate => "indeterminate",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }
}

/// Verdict plus the rule that produced it; the pairing is consistent by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairLabel {
    pub verdict: Verdict,
    pub rule: Rule,
}

impl PairLabel {
    fn from_rule(rule: Rule) -> Self {
        Self {
            verdict: rule.verdict(),
            rule,
        }
    }
}

/// Applies the mining rules to one posed pair.
pub fn label_pair(
    a: &PosedCamera,
    b: &PosedCamera,
    cand: &MatchCandidate,
    cfg: &MiningConfig,
) -> Result<PairLabel, MineError> {
    cfg.validate()?;
    if a.frame != b.frame {
        return Err(MineError::FrameMismatch);
    }

    // (0) Too few verified matches: the candidate itself is not trustworthy
    // enough to label either way.
    if let Some(n) = cand.num_inliers {
        if n < cfg.min_candidate_inliers {
            return Ok(PairLabel::from_rule(Rule::Indeterminate));
        }
    }

    // (1) Spatially distant pairs are negatives regardless of their geometry.
    let distance = camera_distance(a, b);
    if distance > cfg.distant_threshold_m {
        return Ok(PairLabel::from_rule(Rule::Distant));
    }

    let relation = classify_ray_relation(a, b);
    let angle = view_angle(a, b);

    match relation.case {
        // (2) Converging in front of both, but looking almost at each other:
        // the cameras see different surfaces.
        RayCase::FrontFront if angle > cfg.max_front_angle_deg => {
            return Ok(PairLabel::from_rule(Rule::FrontFrontWideAngle));
        }
        // (3) Meeting behind both with a view angle beyond the narrower
        // diagonal field of view: the frustums cannot share content.
        RayCase::BehindBehind => {
            let min_fov = diagonal_fov(&a.intrinsics, a.width, a.height)
                .min(diagonal_fov(&b.intrinsics, b.width, b.height));
            if angle > min_fov {
                return Ok(PairLabel::from_rule(Rule::BehindBehindOverFov));
            }
        }
        // (4) One-in-front, one-behind with disjoint frustums.
        RayCase::Mixed => {
            if !frustum_overlap(a, b, cfg.frustum_near_m, cfg.frustum_far_m)? {
                return Ok(PairLabel::from_rule(Rule::MixedNoFrustumOverlap));
            }
        }
        RayCase::FrontFront => {}
    }

    // (5) Nearby, converging in front, small view angle, overlapping
    // frustums: a confident true match.
    if relation.case == RayCase::FrontFront
        && distance <= cfg.near_positive_distance_m
        && angle <= cfg.max_positive_angle_deg
        && frustum_overlap(a, b, cfg.frustum_near_m, cfg.frustum_far_m)?
    {
        return Ok(PairLabel::from_rule(Rule::PositiveNearbyConverging));
    }

    // (6) Not confident either way.
    Ok(PairLabel::from_rule(Rule::Indeterminate))
}

/// Per-rule tallies for one mining run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleCounts(pub BTreeMap<&'static str, usize>);

impl RuleCounts {
    fn record(&mut self, rule: Rule) {
        *self.0.entry(rule.name()).or_insert(0) += 1;
    }

    pub fn get(&self, rule: Rule) -> usize {
        self.0.get(rule.name()).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

/// Output of a dataset mining run.
#[derive(Debug, Clone)]
pub struct MiningOutcome {
    /// One label per input candidate, in input order.
    pub labels: Vec<(MatchCandidate, PairLabel)>,
    pub counts: RuleCounts,
    /// ENU origin the cameras were posed against: the centroid of the
    /// dataset's geodetic positions.
    pub origin: Geodetic,
}

/// Centroid of the cameras' positions, used as a shared ENU origin so the
/// whole site stays in one metric frame with minimal distortion.
pub fn dataset_origin(cams: &[GeoCamera]) -> Geodetic {
    if cams.is_empty() {
        return Geodetic { lat: 0.0, lon: 0.0, alt: 0.0 };
    }
    // Average in ECEF to stay correct across the antimeridian.
    let mut sum = nalgebra::Vector3::zeros();
    for cam in cams {
        sum += wgs84_to_ecef(cam.position).as_vector();
    }
    let mean = crate::geom::EcefPoint::from_vector(sum / cams.len() as f64);
    ecef_to_wgs84(mean)
}

/// Labels every candidate against the dataset's cameras.
///
/// Candidates are evaluated in parallel; the output order always equals the
/// input order.
pub fn mine_dataset(
    cams: &[GeoCamera],
    cands: &[MatchCandidate],
    cfg: &MiningConfig,
) -> Result<MiningOutcome, MineError> {
    cfg.validate()?;
    let origin = dataset_origin(cams);

    let mut posed: HashMap<&str, PosedCamera> = HashMap::with_capacity(cams.len());
    for cam in cams {
        if posed
            .insert(cam.id.as_str(), camera_from_geotag(cam, origin))
            .is_some()
        {
            return Err(MineError::DuplicateCameraId(cam.id.clone()));
        }
    }
    for cand in cands {
        for id in [cand.id_a(), cand.id_b()] {
            if !posed.contains_key(id) {
                return Err(MineError::UnknownCameraId(id.to_string()));
            }
        }
    }

    let labels: Vec<PairLabel> = cands
        .par_iter()
        .map(|cand| label_pair(&posed[cand.id_a()], &posed[cand.id_b()], cand, cfg))
        .collect::<Result<_, _>>()?;

    let mut counts = RuleCounts::default();
    for label in &labels {
        counts.record(label.rule);
    }

    Ok(MiningOutcome {
        labels: cands.iter().cloned().zip(labels).collect(),
        counts,
        origin,
    })
}
