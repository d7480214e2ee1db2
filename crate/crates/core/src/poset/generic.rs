use serde::{Deserialize, Serialize};

use super::condition::{certificate, Certificate, Condition};
use super::extend::{extend, ExtendConfig};
use super::weight::phi_from_clopen;
use super::{mix_seed, PosetError};
use crate::dyadic_measure::{ClopenPlaneSet, Rational};

/// Attach `⟨1−ε, φ_F⟩` with `F` the complement of `G`, so that every
/// stronger condition keeps most of its stem outside `G`.
pub fn avoid_null(p: &Condition, g: &ClopenPlaneSet, epsilon: &Rational) -> Result<Condition, PosetError> {
    if !epsilon.in_open_unit() {
        return Err(PosetError::EpsilonOutOfRange(epsilon.clone()));
    }
    let f = g.complement();
    if f.is_empty() {
        return Err(PosetError::NullSet);
    }
    p.attach_weight(Rational::one() - epsilon, phi_from_clopen(&f)?)
}

/// One small cover `G_i` to avoid, attached before extension step `at_step`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub cover: ClopenPlaneSet,
    #[serde(rename = "eps")]
    pub epsilon: Rational,
    #[serde(default)]
    pub at_step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexedCertificate {
    pub index: usize,
    #[serde(flatten)]
    pub certificate: Certificate,
    /// `scoreF > 1 − ε_i`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Attach { index: usize },
    Extend { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub action: Action,
    pub depth: usize,
    pub certificates: Vec<IndexedCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericRun {
    pub seed: u64,
    #[serde(rename = "final")]
    pub last: Condition,
    pub trace: Vec<TraceEntry>,
}

impl GenericRun {
    /// Every certificate recorded along the run kept `scoreF > 1 − ε_i`.
    pub fn all_hold(&self) -> bool {
        self.trace.iter().all(|t| t.certificates.iter().all(|c| c.holds))
    }
}

/// Start from the trivial condition and run `steps` extension steps,
/// attaching each scheduled cover right before its step. Entries scheduled
/// at `steps` are attached after the last extension.
pub fn generic_run(
    schedule: &[ScheduleEntry],
    steps: usize,
    seed: u64,
    config: &ExtendConfig,
) -> Result<GenericRun, PosetError> {
    if let Some(e) = schedule.iter().find(|e| e.at_step > steps) {
        return Err(PosetError::ScheduleOutOfRange { at_step: e.at_step, steps });
    }
    let mut p = Condition::trivial();
    let mut attached: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    let certify = |p: &Condition, attached: &[usize]| -> Vec<IndexedCertificate> {
        attached
            .iter()
            .map(|&index| {
                let entry = &schedule[index];
                let certificate = certificate(p, &entry.cover.complement());
                let holds = certificate.score_f > Rational::one() - &entry.epsilon;
                IndexedCertificate { index, certificate, holds }
            })
            .collect()
    };

    for step in 0..=steps {
        for (index, entry) in schedule.iter().enumerate().filter(|(_, e)| e.at_step == step) {
            p = avoid_null(&p, &entry.cover, &entry.epsilon).map_err(|e| e.at(step))?;
            attached.push(index);
            trace.push(TraceEntry {
                step,
                action: Action::Attach { index },
                depth: p.depth(),
                certificates: certify(&p, &attached),
            });
        }
        if step == steps {
            break;
        }
        let step_seed = mix_seed(seed, 0x5eed, step as u64);
        let (q, report) = extend(&p, step_seed, config).map_err(|e| e.at(step))?;
        log::info!("step {step}: depth {} -> {}", report.from_depth, report.to_depth);
        p = q;
        trace.push(TraceEntry {
            step,
            action: Action::Extend { seed: step_seed },
            depth: p.depth(),
            certificates: certify(&p, &attached),
        });
    }
    Ok(GenericRun { seed, last: p, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic_measure::{plane, rat};

    #[test]
    fn null_cover_needs_small_measure() {
        let g = plane(&[("0", "")]);
        assert!(avoid_null(&Condition::trivial(), &g, &rat(3, 4)).is_ok());
        assert!(matches!(avoid_null(&Condition::trivial(), &g, &rat(1, 2)), Err(PosetError::ScoreTooLow { .. })));
        assert_eq!(
            avoid_null(&Condition::trivial(), &ClopenPlaneSet::full(), &rat(1, 2)).unwrap_err(),
            PosetError::NullSet
        );
    }

    #[test]
    fn short_run_keeps_certificates() {
        let schedule = vec![ScheduleEntry { cover: plane(&[("000", "1")]), epsilon: rat(1, 4), at_step: 0 }];
        let run = generic_run(&schedule, 2, 5, &ExtendConfig::default()).unwrap();
        assert!(run.all_hold());
        assert!(run.last.validate().is_ok());
        assert_eq!(run.trace.len(), 3);
    }

    #[test]
    fn schedule_bounds() {
        let schedule = vec![ScheduleEntry { cover: plane(&[("0", "1")]), epsilon: rat(3, 4), at_step: 9 }];
        assert!(matches!(
            generic_run(&schedule, 2, 0, &ExtendConfig::default()),
            Err(PosetError::ScheduleOutOfRange { .. })
        ));
    }
}
