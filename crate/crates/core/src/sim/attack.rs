use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};

/// Input injected by one malicious agent, as a function of the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackSignal {
    Zero,
    Constant { value: f64 },
    /// `amplitude * ratio^k`.
    Geometric { amplitude: f64, ratio: f64 },
    /// Explicit values for steps `0..len`, zero afterwards.
    Sequence { values: Vec<f64> },
}

impl AttackSignal {
    pub fn value_at(&self, k: usize) -> f64 {
        match self {
            AttackSignal::Zero => 0.0,
            AttackSignal::Constant { value } => *value,
            AttackSignal::Geometric { amplitude, ratio } => amplitude * ratio.powi(k as i32),
            AttackSignal::Sequence { values } => values.get(k).copied().unwrap_or(0.0),
        }
    }

    pub fn is_summable(&self) -> bool {
        self.total().is_some()
    }

    /// Sum over all steps, when finite.
    pub fn total(&self) -> Option<f64> {
        match self {
            AttackSignal::Zero => Some(0.0),
            AttackSignal::Constant { value } => (*value == 0.0).then_some(0.0),
            AttackSignal::Geometric { amplitude, ratio } => {
                if *amplitude == 0.0 {
                    Some(0.0)
                } else if ratio.abs() < 1.0 {
                    Some(amplitude / (1.0 - ratio))
                } else {
                    None
                }
            }
            AttackSignal::Sequence { values } => Some(values.iter().sum()),
        }
    }

    fn check(&self) -> Result<()> {
        let finite = match self {
            AttackSignal::Zero => true,
            AttackSignal::Constant { value } => value.is_finite(),
            AttackSignal::Geometric { amplitude, ratio } => amplitude.is_finite() && ratio.is_finite(),
            AttackSignal::Sequence { values } => values.iter().all(|v| v.is_finite()),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::NonFinite("attack signal"))
        }
    }
}

/// Malicious agents `i_1, ..., i_p` and the signal each one injects.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AttackProfile {
    agents: Vec<usize>,
    signals: Vec<AttackSignal>,
}

impl AttackProfile {
    /// `agents` are 1-indexed, distinct, and at most `n`.
    pub fn new(n: usize, agents: Vec<usize>, signals: Vec<AttackSignal>) -> Result<Self> {
        if agents.len() != signals.len() {
            return Err(Error::dims("attack signals", agents.len(), signals.len()));
        }
        check_attacker_set(n, &agents)?;
        for s in &signals {
            s.check()?;
        }
        Ok(AttackProfile { agents, signals })
    }

    pub fn none() -> Self {
        AttackProfile::default()
    }

    pub fn agents(&self) -> &[usize] {
        &self.agents
    }

    pub fn signals(&self) -> &[AttackSignal] {
        &self.signals
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// `u(k)`, one entry per attacker.
    pub fn signal(&self, k: usize) -> Vector {
        Vector::from_iterator(self.len(), self.signals.iter().map(|s| s.value_at(k)))
    }

    /// Attackers whose signal has no finite sum.
    pub fn non_summable_agents(&self) -> Vec<usize> {
        self.agents
            .iter()
            .zip(&self.signals)
            .filter(|(_, s)| !s.is_summable())
            .map(|(&a, _)| a)
            .collect()
    }

    /// `1ᵀ Σ_k u(k)` when every signal is summable.
    pub fn total_injection(&self) -> Option<f64> {
        self.signals.iter().map(AttackSignal::total).sum()
    }
}

pub fn attack_signal(profile: &AttackProfile, k: usize) -> Vector {
    profile.signal(k)
}

pub(crate) fn check_attacker_set(n: usize, agents: &[usize]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &a in agents {
        if a == 0 || a > n {
            return Err(Error::AgentOutOfRange { agent: a, n });
        }
        if !seen.insert(a) {
            return Err(Error::InvalidParameter(format!("attacker {a} listed twice")));
        }
    }
    Ok(())
}

/// `B = [e_{i_1}, ..., e_{i_p}]` for 1-indexed attackers.
pub fn input_matrix(n: usize, agents: &[usize]) -> Result<Matrix> {
    check_attacker_set(n, agents)?;
    let mut b = Matrix::zeros(n, agents.len());
    for (col, &a) in agents.iter().enumerate() {
        b[(a - 1, col)] = 1.0;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_values() {
        let s = AttackSignal::Geometric { amplitude: -24.0, ratio: 0.2 };
        assert_eq!(s.value_at(0), -24.0);
        assert!((s.value_at(2) + 0.96).abs() < 1e-15);
        assert!((s.total().unwrap() + 30.0).abs() < 1e-12);
        let partial: f64 = (0..60).map(|k| s.value_at(k)).sum();
        assert!((partial + 30.0).abs() < 1e-12);
    }

    #[test]
    fn zero_and_sequence() {
        let p = AttackProfile::new(4, vec![2], vec![AttackSignal::Zero]).unwrap();
        assert_eq!(p.signal(17), Vector::zeros(1));
        let s = AttackSignal::Sequence { values: vec![1.0, 2.0] };
        assert_eq!((s.value_at(1), s.value_at(2)), (2.0, 0.0));
        assert_eq!(s.total(), Some(3.0));
    }

    #[test]
    fn non_summable_flagged() {
        let p = AttackProfile::new(
            4,
            vec![1, 3],
            vec![
                AttackSignal::Constant { value: 1.0 },
                AttackSignal::Geometric { amplitude: 1.0, ratio: 0.5 },
            ],
        )
        .unwrap();
        assert_eq!(p.non_summable_agents(), vec![1]);
        assert_eq!(p.total_injection(), None);
    }

    #[test]
    fn profile_validation() {
        assert!(AttackProfile::new(3, vec![4], vec![AttackSignal::Zero]).is_err());
        assert!(AttackProfile::new(3, vec![1, 1], vec![AttackSignal::Zero, AttackSignal::Zero]).is_err());
        assert!(AttackProfile::new(3, vec![1], vec![]).is_err());
    }

    #[test]
    fn input_matrix_columns() {
        let b = input_matrix(4, &[3, 1]).unwrap();
        assert_eq!(b[(2, 0)], 1.0);
        assert_eq!(b[(0, 1)], 1.0);
        assert_eq!(b.sum(), 2.0);
    }

    #[test]
    fn signal_serde_shape() {
        let s: AttackSignal =
            serde_json::from_str(r#"{"type":"geometric","amplitude":-24,"ratio":0.2}"#).unwrap();
        assert_eq!(s, AttackSignal::Geometric { amplitude: -24.0, ratio: 0.2 });
        assert!(serde_json::from_str::<AttackSignal>(r#"{"type":"constant","value":1,"x":1}"#).is_err());
    }
}
