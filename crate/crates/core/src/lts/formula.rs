use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{LtsError, PointedLts, TREE_LABEL};
use crate::foundations::{EpSet, OrdinalCnf, Rank};

/// Finite modal formulas plus two symbolic atoms for infinitary cases.
///
/// JSON is externally tagged: `"top"`, `{"neg": φ}`, `{"and": [..]}`,
/// `{"dia": {"label": "a", "body": φ}}`, `{"rank_at_least": [[1,1]]}`,
/// `{"char_set": {"prefix": "", "period": "10"}}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModalFormula {
    Top,
    Neg(Box<ModalFormula>),
    And(Vec<ModalFormula>),
    Or(Vec<ModalFormula>),
    Dia { label: String, body: Box<ModalFormula> },
    /// Holds iff the rank of the current state is at least the ordinal.
    RankAtLeast(OrdinalCnf),
    /// `⋀_{n∈z} ◇^{n+1}¬◇⊤ ∧ ⋀_{n∉z} ¬◇^{n+1}¬◇⊤`, for symbolic trees only.
    CharSet(EpSet),
}

impl ModalFormula {
    pub fn neg(phi: ModalFormula) -> Self {
        ModalFormula::Neg(Box::new(phi))
    }

    pub fn dia(label: &str, body: ModalFormula) -> Self {
        ModalFormula::Dia { label: label.to_string(), body: Box::new(body) }
    }

    /// `◇^n φ` over the tree label.
    pub fn dia_pow(n: u64, body: ModalFormula) -> Self {
        (0..n).fold(body, |acc, _| ModalFormula::dia(TREE_LABEL, acc))
    }

    /// `¬◇⊤` over the tree label.
    pub fn leaf() -> Self {
        ModalFormula::neg(ModalFormula::dia(TREE_LABEL, ModalFormula::Top))
    }

    /// Nesting depth of diamonds.
    pub fn modal_depth(&self) -> usize {
        match self {
            ModalFormula::Top | ModalFormula::RankAtLeast(_) | ModalFormula::CharSet(_) => 0,
            ModalFormula::Neg(p) => p.modal_depth(),
            ModalFormula::And(ps) | ModalFormula::Or(ps) => {
                ps.iter().map(ModalFormula::modal_depth).max().unwrap_or(0)
            }
            ModalFormula::Dia { body, .. } => body.modal_depth() + 1,
        }
    }
}

/// Ranks of every state: `∞` exactly for states from which a cycle is
/// reachable, otherwise `sup{rank(t)+1}` over all successors.
pub fn state_ranks(lts: &PointedLts) -> Vec<Rank> {
    let n = lts.num_states();
    let mut rank: Vec<Option<u64>> = vec![None; n];
    loop {
        let mut progress = false;
        for s in 0..n {
            if rank[s].is_some() {
                continue;
            }
            let succ = lts.all_successors(s);
            if succ.iter().all(|&t| rank[t].is_some()) {
                rank[s] = Some(succ.iter().map(|&t| rank[t].unwrap() + 1).max().unwrap_or(0));
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    rank.into_iter().map(|r| r.map_or(Rank::Infinite, Rank::nat)).collect()
}

pub fn state_rank(lts: &PointedLts, s: usize) -> Rank {
    state_ranks(lts).swap_remove(s)
}

/// States of finite rank.
pub fn wf_part(lts: &PointedLts) -> BTreeSet<usize> {
    state_ranks(lts).iter().enumerate().filter(|(_, r)| r.is_finite()).map(|(s, _)| s).collect()
}

/// Pointwise satisfaction by structural recursion.
pub fn eval_formula(lts: &PointedLts, s: usize, phi: &ModalFormula) -> Result<bool, LtsError> {
    Ok(match phi {
        ModalFormula::Top => true,
        ModalFormula::Neg(p) => !eval_formula(lts, s, p)?,
        ModalFormula::And(ps) => {
            for p in ps {
                if !eval_formula(lts, s, p)? {
                    return Ok(false);
                }
            }
            true
        }
        ModalFormula::Or(ps) => {
            for p in ps {
                if eval_formula(lts, s, p)? {
                    return Ok(true);
                }
            }
            false
        }
        ModalFormula::Dia { label, body } => {
            for &t in lts.successors_by_name(s, label) {
                if eval_formula(lts, t, body)? {
                    return Ok(true);
                }
            }
            false
        }
        ModalFormula::RankAtLeast(alpha) => state_rank(lts, s).at_least(alpha),
        ModalFormula::CharSet(_) => return Err(LtsError::CharSetOnLts),
    })
}

/// The validity set, computed bottom-up on sets of states.
pub fn sem_set(lts: &PointedLts, phi: &ModalFormula) -> Result<BTreeSet<usize>, LtsError> {
    let all: BTreeSet<usize> = (0..lts.num_states()).collect();
    Ok(match phi {
        ModalFormula::Top => all,
        ModalFormula::Neg(p) => all.difference(&sem_set(lts, p)?).copied().collect(),
        ModalFormula::And(ps) => {
            let mut acc = all;
            for p in ps {
                let v = sem_set(lts, p)?;
                acc.retain(|s| v.contains(s));
            }
            acc
        }
        ModalFormula::Or(ps) => {
            let mut acc = BTreeSet::new();
            for p in ps {
                acc.extend(sem_set(lts, p)?);
            }
            acc
        }
        ModalFormula::Dia { label, body } => {
            let target = sem_set(lts, body)?;
            match lts.label_index(label) {
                None => BTreeSet::new(),
                Some(a) => lts
                    .edges()
                    .filter(|&(_, b, t)| b == a && target.contains(&t))
                    .map(|(s, _, _)| s)
                    .collect(),
            }
        }
        ModalFormula::RankAtLeast(alpha) => state_ranks(lts)
            .iter()
            .enumerate()
            .filter(|(_, r)| r.at_least(alpha))
            .map(|(s, _)| s)
            .collect(),
        ModalFormula::CharSet(_) => return Err(LtsError::CharSetOnLts),
    })
}

/// `φ_α`: explicit below ω (`φ_{n+1} = ⋁_a ⟨a⟩φ_n`), symbolic from ω on.
pub fn build_phi(alpha: &OrdinalCnf, labels: &[String]) -> ModalFormula {
    let Some(n) = alpha.as_nat() else {
        return ModalFormula::RankAtLeast(alpha.clone());
    };
    (0..n).fold(ModalFormula::Top, |acc, _| match labels {
        [only] => ModalFormula::dia(only, acc),
        _ => ModalFormula::Or(labels.iter().map(|a| ModalFormula::dia(a, acc.clone())).collect()),
    })
}

/// `ψ_α` over the tree label: `◇^n⊤` below ω, symbolic from ω on.
pub fn build_psi(alpha: &OrdinalCnf) -> ModalFormula {
    match alpha.as_nat() {
        Some(n) => ModalFormula::dia_pow(n, ModalFormula::Top),
        None => ModalFormula::RankAtLeast(alpha.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> PointedLts {
        PointedLts::from_indexed(vec!["a".into()], 2, 0, [(0, 0, 1)])
    }

    #[test]
    fn diamond_on_chain() {
        let l = chain();
        let phi = ModalFormula::dia("a", ModalFormula::Top);
        assert!(eval_formula(&l, 0, &phi).unwrap());
        assert!(!eval_formula(&l, 1, &phi).unwrap());
        assert_eq!(sem_set(&l, &ModalFormula::Top).unwrap(), [0, 1].into());
    }

    #[test]
    fn rank_examples() {
        let l = chain();
        assert_eq!(state_rank(&l, 1), Rank::nat(0));
        assert_eq!(state_rank(&l, 0), Rank::nat(1));
        let looped = PointedLts::from_indexed(vec!["a".into()], 2, 0, [(0, 0, 0)]);
        assert_eq!(state_rank(&looped, 0), Rank::Infinite);
        assert_eq!(wf_part(&looped), [1].into());
    }

    #[test]
    fn phi_shapes() {
        let labels = vec!["a".to_string()];
        assert_eq!(build_phi(&OrdinalCnf::zero(), &labels), ModalFormula::Top);
        let two = build_phi(&OrdinalCnf::from_nat(2), &labels);
        assert_eq!(two, ModalFormula::dia("a", ModalFormula::dia("a", ModalFormula::Top)));
        assert_eq!(
            build_phi(&OrdinalCnf::omega(), &labels),
            ModalFormula::RankAtLeast(OrdinalCnf::omega())
        );
    }

    #[test]
    fn charset_is_rejected() {
        let err = eval_formula(&chain(), 0, &ModalFormula::CharSet(EpSet::empty())).unwrap_err();
        assert_eq!(err, LtsError::CharSetOnLts);
    }

    #[test]
    fn formula_json() {
        let phi = ModalFormula::And(vec![
            ModalFormula::Top,
            ModalFormula::neg(ModalFormula::dia("a", ModalFormula::Top)),
        ]);
        let text = serde_json::to_string(&phi).unwrap();
        assert_eq!(text, r#"{"and":["top",{"neg":{"dia":{"label":"a","body":"top"}}}]}"#);
        assert_eq!(serde_json::from_str::<ModalFormula>(&text).unwrap(), phi);
    }
}
