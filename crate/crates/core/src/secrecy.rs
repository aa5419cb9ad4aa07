//! Eavesdropper models, leakage measurement and Gabidulin pre-coding.
//!
//! An `(l1, l2)` eavesdropper reads the stored content of the nodes in E and
//! every repair symbol sent toward the nodes in F. Its knowledge is a set of
//! observation rows, so leakage is a rank.
//!
//! For secrecy the B-symbol message is replaced by a Gabidulin codeword over
//! L = GF(|F|^B): `c_j = Σ_i u_i g_j^(|F|^i)` with `u = (R ∥ D)`, R being ℓ
//! uniformly random symbols and D the secret. Any F-linear observation of c
//! is a Moore-matrix image of u, which hides D whenever the observation has
//! F-rank at most ℓ.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{secrecy_capacity, CapacityQuery};
use crate::entropy::{joint_entropy, ObsSet};
use crate::field::{ExtensionSpec, Field, FieldError};
use crate::matrix::Matrix;
use crate::pmmsr::{lift, CodeError, PmMsrCode, Selector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SecrecyError {
    #[error("bad eavesdropper model: {0}")]
    BadModel(String),
    #[error("leakage for (l1={l1}, l2={l2}) varies across node choices: {min}..={max}")]
    AsymmetricLeakage { l1: usize, l2: usize, min: usize, max: usize },
    #[error("eavesdropper sees everything; nothing can be stored securely")]
    CapacityZero,
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("Moore matrix is singular")]
    Singular,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Node sets the adversary compromises: E for storage, F for repair traffic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EavesdropperModel {
    pub e: Vec<usize>,
    pub f: Vec<usize>,
}

impl EavesdropperModel {
    pub fn new(mut e: Vec<usize>, mut f: Vec<usize>) -> Result<Self, SecrecyError> {
        e.sort_unstable();
        f.sort_unstable();
        if e.iter().chain(&f).duplicates().next().is_some() {
            return Err(SecrecyError::BadModel("E and F must be disjoint sets".into()));
        }
        Ok(EavesdropperModel { e, f })
    }

    pub fn l1(&self) -> usize {
        self.e.len()
    }

    pub fn l2(&self) -> usize {
        self.f.len()
    }

    pub fn check(&self, code: &PmMsrCode) -> Result<(), SecrecyError> {
        let n = code.params().n;
        if let Some(&bad) = self.e.iter().chain(&self.f).find(|&&i| i == 0 || i > n) {
            return Err(SecrecyError::BadModel(format!("unknown node {bad}")));
        }
        if self.l1() + self.l2() >= code.params().k {
            return Err(SecrecyError::BadModel(format!(
                "l1 + l2 = {} must be below k = {}",
                self.l1() + self.l2(),
                code.params().k
            )));
        }
        Ok(())
    }
}

/// Every model with |E| = l1 and |F| = l2 on `code`'s nodes, in
/// lexicographic order of (E, F).
pub fn models(code: &PmMsrCode, l1: usize, l2: usize) -> Vec<EavesdropperModel> {
    let nodes: Vec<usize> = code.nodes().collect();
    let mut out = Vec::new();
    for e in nodes.iter().copied().combinations(l1) {
        let rest: Vec<usize> = nodes.iter().copied().filter(|i| !e.contains(i)).collect();
        for f in rest.into_iter().combinations(l2) {
            out.push(EavesdropperModel { e: e.clone(), f });
        }
    }
    out
}

/// W_E together with S^F, where each f ∈ F hears from all n - 1 other nodes.
pub fn eavesdropped_rows(code: &PmMsrCode, model: &EavesdropperModel) -> Result<ObsSet, SecrecyError> {
    model.check(code)?;
    let stored = ObsSet::select(code, &Selector::Stored(model.e.clone()))?;
    let repair = ObsSet::select(code, &Selector::RepairTo(model.f.clone()))?;
    Ok(stored.union(&repair).expect("same code"))
}

/// H(W_E, S^F).
pub fn leakage(code: &PmMsrCode, model: &EavesdropperModel) -> Result<usize, SecrecyError> {
    Ok(joint_entropy(&eavesdropped_rows(code, model)?))
}

/// B - H(W_E, S^F).
pub fn achieved_secure_size(code: &PmMsrCode, model: &EavesdropperModel) -> Result<usize, SecrecyError> {
    Ok(code.params().b - leakage(code, model)?)
}

/// The capacity query matching `code` under an `(l1, l2)` eavesdropper.
pub fn capacity_query(code: &PmMsrCode, l1: usize, l2: usize) -> CapacityQuery {
    let p = code.params();
    CapacityQuery {
        k: p.k,
        d: p.d,
        n: p.n,
        alpha: p.alpha,
        beta: p.beta,
        l1,
        l2,
    }
}

/// Gabidulin pre-coding layer on top of a product-matrix code.
#[derive(Debug, Clone)]
pub struct SecureScheme {
    code: PmMsrCode,
    ext: ExtensionSpec,
    points: Vec<u64>,
    l1: usize,
    l2: usize,
    randomness: usize,
    moore: Matrix<ExtensionSpec>,
    moore_inv: Matrix<ExtensionSpec>,
}

impl SecureScheme {
    /// Builds the layer for `(l1, l2)`, setting ℓ to the largest leakage over
    /// every model of that shape. Fails if the leakage depends on which nodes
    /// are chosen, or if nothing is left for the secret.
    pub fn new(code: &PmMsrCode, l1: usize, l2: usize) -> Result<Self, SecrecyError> {
        let all = models(code, l1, l2);
        if all.is_empty() {
            return Err(SecrecyError::BadModel(format!("no ({l1},{l2}) model fits n = {}", code.params().n)));
        }
        let mut lo = usize::MAX;
        let mut hi = 0;
        for m in &all {
            let h = leakage(code, m)?;
            lo = lo.min(h);
            hi = hi.max(h);
        }
        if lo != hi {
            return Err(SecrecyError::AsymmetricLeakage { l1, l2, min: lo, max: hi });
        }
        if hi == code.params().b {
            return Err(SecrecyError::CapacityZero);
        }
        Self::with_randomness(code, l1, l2, hi)
    }

    /// Builds the layer with an explicit amount of randomness ℓ ≤ B.
    pub fn with_randomness(code: &PmMsrCode, l1: usize, l2: usize, randomness: usize) -> Result<Self, SecrecyError> {
        let b = code.params().b;
        if randomness > b {
            return Err(SecrecyError::LengthMismatch {
                expected: b,
                got: randomness,
            });
        }
        if l1 + l2 >= code.params().k {
            return Err(SecrecyError::BadModel(format!(
                "l1 + l2 = {} must be below k = {}",
                l1 + l2,
                code.params().k
            )));
        }
        let ext = ExtensionSpec::new(code.field(), b)?;
        Self::with_extension(code, ext, l1, l2, randomness)
    }

    /// Uses a given extension of degree B (for reloading saved schemes).
    pub fn with_extension(
        code: &PmMsrCode,
        ext: ExtensionSpec,
        l1: usize,
        l2: usize,
        randomness: usize,
    ) -> Result<Self, SecrecyError> {
        let b = code.params().b;
        if ext.base() != code.field() || ext.degree() != b {
            return Err(SecrecyError::Field(FieldError::FieldMismatch));
        }
        let points: Vec<u64> = (0..b).map(|j| ext.basis(j)).collect();
        let mut data = Vec::with_capacity(b * b);
        for &g in &points {
            let mut x = g;
            for _ in 0..b {
                data.push(x);
                x = ext.pow(x, ext.base().order());
            }
        }
        let moore = Matrix::new(ext.clone(), b, b, data).expect("B x B");
        let moore_inv = moore.invert().map_err(|_| SecrecyError::Singular)?;
        Ok(SecureScheme {
            code: code.clone(),
            ext,
            points,
            l1,
            l2,
            randomness,
            moore,
            moore_inv,
        })
    }

    pub fn code(&self) -> &PmMsrCode {
        &self.code
    }

    pub fn extension(&self) -> &ExtensionSpec {
        &self.ext
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn l1(&self) -> usize {
        self.l1
    }

    pub fn l2(&self) -> usize {
        self.l2
    }

    /// ℓ, the number of random symbols.
    pub fn randomness(&self) -> usize {
        self.randomness
    }

    /// B^(s) = B - ℓ.
    pub fn secret_size(&self) -> usize {
        self.code.params().b - self.randomness
    }

    pub fn moore(&self) -> &Matrix<ExtensionSpec> {
        &self.moore
    }

    fn check_l(&self, v: &[u64], expected: usize) -> Result<(), SecrecyError> {
        if v.len() != expected {
            return Err(SecrecyError::LengthMismatch { expected, got: v.len() });
        }
        if let Some(&x) = v.iter().find(|&&x| !self.ext.contains(x)) {
            return Err(SecrecyError::Field(FieldError::NotAnElement(x)));
        }
        Ok(())
    }

    /// Codeword c = Moore · (R ∥ D), used as the MSR message over L.
    pub fn wrap(&self, secret: &[u64], randomness: &[u64]) -> Result<Vec<u64>, SecrecyError> {
        self.check_l(secret, self.secret_size())?;
        self.check_l(randomness, self.randomness)?;
        let u: Vec<u64> = randomness.iter().chain(secret).copied().collect();
        Ok(self.moore.apply(&u).expect("length B"))
    }

    /// Recovers D from a reconstructed codeword.
    pub fn unwrap(&self, codeword: &[u64]) -> Result<Vec<u64>, SecrecyError> {
        self.check_l(codeword, self.code.params().b)?;
        let u = self.moore_inv.apply(codeword).expect("length B");
        Ok(u[self.randomness..].to_vec())
    }

    /// Checks I(D; rows) = 0 for F-linear observations `rows` of the codeword.
    pub fn verify_rows(&self, rows: &ObsSet) -> PerfectReport {
        let a = lift(&rows.matrix(), &self.ext);
        let image = a.mul(&self.moore).expect("width B");
        let random_cols: Vec<usize> = (0..self.randomness).collect();
        let rank_all = image.rank();
        let rank_random = image.select_cols(&random_cols).rank();
        PerfectReport {
            perfect: rank_all == rank_random,
            observed_rank: rank_all,
            random_rank: rank_random,
            leaked: rank_all - rank_random,
        }
    }

    /// Checks I(D; W_E, S^F) = 0 for one model.
    pub fn verify_perfect(&self, model: &EavesdropperModel) -> Result<PerfectReport, SecrecyError> {
        if model.l1() > self.l1 || model.l2() > self.l2 {
            return Err(SecrecyError::BadModel(format!(
                "model ({},{}) exceeds scheme ({},{})",
                model.l1(),
                model.l2(),
                self.l1,
                self.l2
            )));
        }
        Ok(self.verify_rows(&eavesdropped_rows(&self.code, model)?))
    }
}

/// Outcome of a secrecy check; ranks are over L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectReport {
    pub perfect: bool,
    /// Rank of the observed image of (R ∥ D).
    pub observed_rank: usize,
    /// Rank of its restriction to R.
    pub random_rank: usize,
    /// I(D; observation) in L-symbols.
    pub leaked: usize,
}

/// What an attack on one model reveals, in the on-disk JSON shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackReport {
    pub model: EavesdropperModel,
    pub leakage: usize,
    pub secure_size: usize,
    pub perfect: bool,
    pub formula_value: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Attack report for the full eavesdropped view of `model`. Without a scheme
/// the message itself is the secret, so secrecy holds only with zero leakage.
pub fn attack_report(
    code: &PmMsrCode,
    model: &EavesdropperModel,
    scheme: Option<&SecureScheme>,
) -> Result<AttackReport, SecrecyError> {
    let rows = eavesdropped_rows(code, model)?;
    report_for_rows(code, model, &rows, scheme)
}

/// Attack report for an arbitrary set of eavesdropped rows attributed to `model`.
pub fn report_for_rows(
    code: &PmMsrCode,
    model: &EavesdropperModel,
    rows: &ObsSet,
    scheme: Option<&SecureScheme>,
) -> Result<AttackReport, SecrecyError> {
    model.check(code)?;
    let leakage = joint_entropy(rows);
    let secure_size = code.params().b - leakage;
    let perfect = match scheme {
        Some(s) => s.verify_rows(rows).perfect,
        None => leakage == 0,
    };
    let formula = secrecy_capacity(&capacity_query(code, model.l1(), model.l2()))
        .map_err(|e| SecrecyError::BadModel(e.to_string()))?;
    Ok(AttackReport {
        model: model.clone(),
        leakage,
        secure_size,
        perfect,
        formula_value: formula.value.to_string(),
        matches: formula.admits(secure_size),
    })
}
