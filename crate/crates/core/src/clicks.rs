//! Cascade click model: the user scans the list top-down, clicks with a
//! grade-dependent probability and, after a click, stops with a
//! grade-dependent probability.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multileaving::ClickVector;

pub const MAX_GRADE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickModelKind {
    Perfect,
    Navigational,
    Informational,
    Custom,
}

impl fmt::Display for ClickModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClickModelKind::Perfect => "perfect",
            ClickModelKind::Navigational => "navigational",
            ClickModelKind::Informational => "informational",
            ClickModelKind::Custom => "custom",
        })
    }
}

impl FromStr for ClickModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" | "perf" => Ok(ClickModelKind::Perfect),
            "navigational" | "nav" => Ok(ClickModelKind::Navigational),
            "informational" | "inf" => Ok(ClickModelKind::Informational),
            other => Err(Error::InvalidConfig(format!("unknown click model {other:?}"))),
        }
    }
}

/// Click and stop probabilities for grades 0..=4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickModelParams {
    pub name: ClickModelKind,
    pub p_click: [f64; MAX_GRADE + 1],
    pub p_stop: [f64; MAX_GRADE + 1],
}

impl ClickModelParams {
    pub fn perfect() -> Self {
        ClickModelParams {
            name: ClickModelKind::Perfect,
            p_click: [0.0, 0.2, 0.4, 0.8, 1.0],
            p_stop: [0.0; 5],
        }
    }

    pub fn navigational() -> Self {
        ClickModelParams {
            name: ClickModelKind::Navigational,
            p_click: [0.05, 0.3, 0.5, 0.7, 0.95],
            p_stop: [0.2, 0.3, 0.5, 0.7, 0.9],
        }
    }

    pub fn informational() -> Self {
        ClickModelParams {
            name: ClickModelKind::Informational,
            p_click: [0.4, 0.6, 0.7, 0.8, 0.9],
            p_stop: [0.1, 0.2, 0.3, 0.4, 0.5],
        }
    }

    pub fn of_kind(kind: ClickModelKind) -> Result<Self> {
        match kind {
            ClickModelKind::Perfect => Ok(Self::perfect()),
            ClickModelKind::Navigational => Ok(Self::navigational()),
            ClickModelKind::Informational => Ok(Self::informational()),
            ClickModelKind::Custom => Err(Error::InvalidConfig(
                "a custom click model needs explicit probabilities".into(),
            )),
        }
    }

    /// Starts from `base` and replaces the listed grades. Keys are grades as
    /// strings, as they appear in a JSON object.
    pub fn with_overrides(
        base: &ClickModelParams,
        click: &BTreeMap<String, f64>,
        stop: &BTreeMap<String, f64>,
    ) -> Result<Self> {
        let mut params = base.clone();
        for (map, target, label) in [
            (click, &mut params.p_click, "click"),
            (stop, &mut params.p_stop, "stop"),
        ] {
            for (grade, &p) in map {
                let g: usize = grade
                    .parse()
                    .ok()
                    .filter(|&g| g <= MAX_GRADE)
                    .ok_or_else(|| Error::InvalidConfig(format!("{label} override has invalid grade {grade:?}")))?;
                target[g] = p;
            }
        }
        if !click.is_empty() || !stop.is_empty() {
            params.name = ClickModelKind::Custom;
        }
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, probs) in [("click", &self.p_click), ("stop", &self.p_stop)] {
            if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::InvalidConfig(format!(
                    "{label} probability {p} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatedClicks {
    pub clicks: ClickVector,
    /// Slot after which the user stopped examining, if they did.
    pub stopped_at: Option<usize>,
    /// Grades above the model's range that were clamped to the top grade.
    pub clamped: usize,
}

/// Simulates one user on a displayed list given the relevance grade of each
/// slot. Slots after the stopping point stay unclicked.
pub fn simulate_clicks<R: Rng + ?Sized>(params: &ClickModelParams, relevances: &[u32], rng: &mut R) -> SimulatedClicks {
    let mut clicked = vec![false; relevances.len()];
    let clamped = relevances.iter().filter(|&&g| g as usize > MAX_GRADE).count();
    let mut stopped_at = None;
    for (slot, &grade) in relevances.iter().enumerate() {
        let g = (grade as usize).min(MAX_GRADE);
        if rng.random::<f64>() < params.p_click[g] {
            clicked[slot] = true;
            if rng.random::<f64>() < params.p_stop[g] {
                stopped_at = Some(slot);
                break;
            }
        }
    }
    SimulatedClicks {
        clicks: ClickVector::new(clicked),
        stopped_at,
        clamped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perfect_model_is_deterministic_on_extreme_grades() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = ClickModelParams::perfect();
        for _ in 0..1000 {
            let out = simulate_clicks(&p, &[0, 0, 4], &mut rng);
            assert_eq!(out.clicks.clicked, vec![false, false, true]);
            let out = simulate_clicks(&p, &[4, 0, 4, 4, 0], &mut rng);
            assert_eq!(out.clicks.clicked, vec![true, false, true, true, false]);
        }
    }

    #[test]
    fn zero_click_probability_never_clicks() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ClickModelParams {
            name: ClickModelKind::Custom,
            p_click: [0.0; 5],
            p_stop: [1.0; 5],
        };
        for _ in 0..100 {
            assert_eq!(simulate_clicks(&p, &[4, 3, 2, 1, 0], &mut rng).clicks.count(), 0);
        }
    }

    #[test]
    fn stop_ends_examination() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = ClickModelParams {
            name: ClickModelKind::Custom,
            p_click: [1.0; 5],
            p_stop: [1.0; 5],
        };
        assert_eq!(
            simulate_clicks(&p, &[1, 4, 4], &mut rng).clicks.clicked,
            vec![true, false, false]
        );
    }

    #[test]
    fn cascade_prefix_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let always_stop = ClickModelParams {
            p_stop: [1.0; 5],
            ..ClickModelParams::informational()
        };
        for _ in 0..2000 {
            let rels: Vec<u32> = (0..10).map(|_| rng.random_range(0..5)).collect();
            let out = simulate_clicks(&always_stop, &rels, &mut rng);
            // The first click ends the session.
            assert!(out.clicks.count() <= 1);
            assert_eq!(out.stopped_at, out.clicks.clicked.iter().position(|&c| c));
        }
        let nav = ClickModelParams::navigational();
        for _ in 0..2000 {
            let rels: Vec<u32> = (0..10).map(|_| rng.random_range(0..5)).collect();
            let out = simulate_clicks(&nav, &rels, &mut rng);
            if let Some(stop) = out.stopped_at {
                assert!(out.clicks.clicked[stop]);
                assert!(out.clicks.clicked[stop + 1..].iter().all(|&c| !c));
            }
        }
    }

    #[test]
    fn informational_grade_zero_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = ClickModelParams::informational();
        let n = 100_000;
        let clicks = (0..n)
            .filter(|_| simulate_clicks(&p, &[0], &mut rng).clicks.clicked[0])
            .count();
        assert!((clicks as f64 / n as f64 - 0.4).abs() < 0.01);
    }

    #[test]
    fn grades_above_four_clamp() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = simulate_clicks(&ClickModelParams::perfect(), &[5, 7, 0], &mut rng);
        assert_eq!(out.clicks.clicked, vec![true, true, false]);
        assert_eq!(out.clamped, 2);
    }

    #[test]
    fn overrides() {
        let click = BTreeMap::from([("0".to_string(), 0.1)]);
        let p = ClickModelParams::with_overrides(&ClickModelParams::perfect(), &click, &BTreeMap::new()).unwrap();
        assert_eq!(p.p_click, [0.1, 0.2, 0.4, 0.8, 1.0]);
        assert_eq!(p.name, ClickModelKind::Custom);
        let bad = BTreeMap::from([("9".to_string(), 0.1)]);
        assert!(ClickModelParams::with_overrides(&p, &bad, &BTreeMap::new()).is_err());
        let out_of_range = BTreeMap::from([("1".to_string(), 1.5)]);
        assert!(ClickModelParams::with_overrides(&p, &BTreeMap::new(), &out_of_range).is_err());
        assert_eq!("inf".parse::<ClickModelKind>().unwrap(), ClickModelKind::Informational);
    }
}
