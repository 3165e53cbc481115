use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{within_energy, FockState};

/// `φ(A) = Σ c_k ⟨bra_k|A ket_k⟩` with all vectors in the range of `P_E`.
#[derive(Clone, Debug)]
pub struct FiniteRankFunctional {
    pub terms: Vec<(Complex64, FockState, FockState)>,
    pub energy: f64,
}

impl FiniteRankFunctional {
    pub fn new(terms: Vec<(Complex64, FockState, FockState)>, energy: f64) -> Result<Self> {
        for (_, bra, ket) in &terms {
            for v in [bra, ket] {
                if !within_energy(v.max_energy(), energy) {
                    return Err(Error::Precondition(format!(
                        "functional vector carries energy {} above E = {energy}",
                        v.max_energy()
                    )));
                }
            }
        }
        Ok(Self { terms, energy })
    }

    pub fn rank_one(bra: FockState, ket: FockState, energy: f64) -> Result<Self> {
        Self::new(vec![(Complex64::new(1.0, 0.0), bra, ket)], energy)
    }

    /// The vacuum state `ω₀` on the given space.
    pub fn vacuum(space: &std::sync::Arc<crate::fock::FockSpace>) -> Self {
        let om = FockState::vacuum(space);
        Self { terms: vec![(Complex64::new(1.0, 0.0), om.clone(), om)], energy: 0.0 }
    }

    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(c, b, k)| c.norm() * b.norm() * k.norm()).sum()
    }

    pub fn eval<F: Fn(&FockState) -> FockState>(&self, op: F) -> Complex64 {
        self.terms.iter().map(|(c, bra, ket)| c * bra.inner(&op(ket))).sum()
    }

    /// Evaluates an operator given as a sesquilinear form `(bra, ket) ↦ ⟨bra|A ket⟩`.
    pub fn eval_form<F: Fn(&FockState, &FockState) -> Complex64>(&self, form: F) -> Complex64 {
        self.terms.iter().map(|(c, bra, ket)| c * form(bra, ket)).sum()
    }
}
