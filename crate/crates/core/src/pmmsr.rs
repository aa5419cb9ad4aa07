//! Product-matrix MSR codes with d = 2k - 2 and β₀ = 1, plus m-fold
//! concatenations (β = m).
//!
//! Each copy stores a message matrix M = [S1; S2] built from two symmetric
//! α₀ × α₀ matrices (α₀ = k - 1). Node i holds ψ_iᵀM where
//! ψ_i = (1, x_i, ..., x_i^(d-1)) = [φ_i, λ_i φ_i] and λ_i = x_i^α₀. A
//! helper i repairing f sends ψ_iᵀMφ_f, which depends on nothing but i, f
//! and i's own share.
//!
//! Node ids are 1-based throughout.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldSpec};
use crate::matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("field of order {order} is too small for {n} nodes")]
    FieldTooSmall { n: usize, order: u128 },
    #[error("cannot find evaluation points with distinct x^{0}")]
    DegenerateLambda(usize),
    #[error("invalid evaluation points: {0}")]
    BadPoints(String),
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node {0} cannot help repair itself")]
    SelfRepair(usize),
    #[error("repair needs exactly {expected} helpers, got {got}")]
    WrongHelperCount { expected: usize, got: usize },
    #[error("reconstruction needs exactly {expected} nodes, got {got}")]
    WrongNodeCount { expected: usize, got: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("node {0} listed twice")]
    DuplicateNode(usize),
    #[error("helper system is singular (invalid code instance)")]
    SingularSystem,
    #[error("stored rows have rank {rank}, expected {expected} (invalid code instance)")]
    RankDeficient { rank: usize, expected: usize },
    #[error("bad selector: {0}")]
    BadSelector(String),
    #[error("symbols must come from the code's field or an extension of it")]
    FieldMismatch,
    #[error("value {0:#x} is not a field element")]
    NotAnElement(u64),
}

/// Parameters of an MSR code at the point α = (d - k + 1)β.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub alpha: usize,
    pub beta: usize,
    /// Message size B = kα.
    pub b: usize,
    /// Number of concatenated scalar copies.
    pub m: usize,
}

impl CodeParams {
    /// Product-matrix parameters: d = 2k - 2, α = m(k - 1), β = m, B = kα.
    pub fn product_matrix(n: usize, k: usize, m: usize) -> Result<Self, CodeError> {
        if k < 2 {
            return Err(CodeError::BadParams("k must be at least 2".into()));
        }
        if m == 0 {
            return Err(CodeError::BadParams("concatenation factor must be at least 1".into()));
        }
        let d = 2 * k - 2;
        let p = CodeParams {
            n,
            k,
            d,
            alpha: m * (k - 1),
            beta: m,
            b: k * m * (k - 1),
            m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        let bad = |s: String| Err(CodeError::BadParams(s));
        if self.k < 2 || self.d != 2 * self.k - 2 {
            return bad(format!("product-matrix codes need d = 2k-2 (k={}, d={})", self.k, self.d));
        }
        if self.n < self.d + 1 {
            return bad(format!("n = {} must be at least d + 1 = {}", self.n, self.d + 1));
        }
        if self.m == 0 || self.beta != self.m {
            return bad("β must equal the concatenation factor".into());
        }
        if self.alpha != (self.d - self.k + 1) * self.beta {
            return bad("α must equal (d-k+1)β".into());
        }
        if self.b != self.k * self.alpha {
            return bad("B must equal kα".into());
        }
        Ok(())
    }

    /// Per-copy storage α₀ = k - 1.
    pub fn alpha0(&self) -> usize {
        self.k - 1
    }

    /// Message symbols per copy, the entries of two symmetric α₀ × α₀ matrices.
    pub fn block(&self) -> usize {
        let a = self.alpha0();
        a * (a + 1)
    }

    /// The cut-set bound Σ_{i=0}^{k-1} min(α, (d - i)β); equals B at the MSR point.
    pub fn cut_set(&self) -> usize {
        (0..self.k).map(|i| self.alpha.min((self.d - i) * self.beta)).sum()
    }
}

/// Where an observed symbol comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObsTag {
    Stored { node: usize, slot: usize },
    Repair { helper: usize, failed: usize, slot: usize, epoch: u64 },
}

/// One system symbol as a linear functional of the B message symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub tag: ObsTag,
    pub row: Vec<u64>,
}

/// Which symbols to expose as observation rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    /// W_A: everything stored on the listed nodes.
    Stored(Vec<usize>),
    /// S^F: repair data into each listed node from every other node.
    RepairTo(Vec<usize>),
    /// S_A^B: repair data from nodes in A into nodes in B (pairs with i = j skipped).
    RepairFromTo(Vec<usize>, Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct PmMsrCode {
    params: CodeParams,
    field: FieldSpec,
    points: Vec<u64>,
    lambdas: Vec<u64>,
    psi: Matrix<FieldSpec>,
}

impl PmMsrCode {
    /// Builds a code over `field`. Without explicit points, x_i = g^i for the
    /// field's generator g; if the α₀-th powers collide, exponents are picked
    /// greedily in increasing order instead.
    pub fn new(params: CodeParams, field: FieldSpec, points: Option<Vec<u64>>) -> Result<Self, CodeError> {
        params.validate()?;
        let n = params.n;
        let a0 = params.alpha0();
        if field.order() <= n as u128 {
            return Err(CodeError::FieldTooSmall {
                n,
                order: field.order(),
            });
        }
        let points = match points {
            Some(p) => {
                if p.len() != n {
                    return Err(CodeError::BadPoints(format!("expected {n} points, got {}", p.len())));
                }
                if let Some(&x) = p.iter().find(|&&x| !field.contains(x)) {
                    return Err(CodeError::NotAnElement(x));
                }
                if p.contains(&0) {
                    return Err(CodeError::BadPoints("points must be nonzero".into()));
                }
                if !p.iter().all_unique() {
                    return Err(CodeError::BadPoints("points must be distinct".into()));
                }
                if !p.iter().map(|&x| field.pow(x, a0 as u128)).all_unique() {
                    return Err(CodeError::DegenerateLambda(a0));
                }
                p
            }
            None => default_points(&field, n, a0).ok_or(CodeError::DegenerateLambda(a0))?,
        };
        let lambdas = points.iter().map(|&x| field.pow(x, a0 as u128)).collect();
        let psi = Matrix::vandermonde(field.clone(), &points, params.d);
        let code = PmMsrCode {
            params,
            field,
            points,
            lambdas,
            psi,
        };
        code.check_structure()?;
        Ok(code)
    }

    fn check_structure(&self) -> Result<(), CodeError> {
        let n = self.params.n;
        if n <= 8 {
            for set in (0..n).combinations(self.params.d) {
                if self.psi.select_rows(&set).rank() != self.params.d {
                    return Err(CodeError::SingularSystem);
                }
            }
            let phi = self.phi_matrix();
            for set in (0..n).combinations(self.params.alpha0()) {
                if phi.select_rows(&set).rank() != self.params.alpha0() {
                    return Err(CodeError::SingularSystem);
                }
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    /// Ψ, the n × d encoding matrix.
    pub fn psi(&self) -> &Matrix<FieldSpec> {
        &self.psi
    }

    /// Φ, the first α₀ columns of Ψ.
    pub fn phi_matrix(&self) -> Matrix<FieldSpec> {
        self.psi.select_cols(&(0..self.params.alpha0()).collect::<Vec<_>>())
    }

    pub fn lambda(&self, node: usize) -> u64 {
        self.lambdas[node - 1]
    }

    fn psi_row(&self, node: usize) -> &[u64] {
        self.psi.row(node - 1)
    }

    fn phi_row(&self, node: usize) -> &[u64] {
        &self.psi.row(node - 1)[..self.params.alpha0()]
    }

    /// The same code restricted to nodes 1..=n.
    pub fn truncate(&self, n: usize) -> Result<Self, CodeError> {
        let mut params = self.params;
        params.n = n;
        Self::new(params, self.field.clone(), Some(self.points[..n.min(self.points.len())].to_vec()))
    }

    /// All node ids.
    pub fn nodes(&self) -> impl Iterator<Item = usize> {
        1..=self.params.n
    }

    pub fn check_node(&self, node: usize) -> Result<(), CodeError> {
        if node == 0 || node > self.params.n {
            Err(CodeError::UnknownNode(node))
        } else {
            Ok(())
        }
    }

    /// Every id known and none repeated.
    pub fn check_nodes(&self, nodes: &[usize]) -> Result<(), CodeError> {
        for &i in nodes {
            self.check_node(i)?;
        }
        if let Some(dup) = nodes.iter().duplicates().next() {
            return Err(CodeError::DuplicateNode(*dup));
        }
        Ok(())
    }

    fn check_symbols<K: Field>(&self, k: &K, symbols: &[u64]) -> Result<(), CodeError> {
        if k.symbol_field() != &self.field {
            return Err(CodeError::FieldMismatch);
        }
        match symbols.iter().find(|&&s| !k.contains(s)) {
            Some(&s) => Err(CodeError::NotAnElement(s)),
            None => Ok(()),
        }
    }

    /// Message position of entry (r, c) of the d × α₀ matrix M of copy `copy`.
    pub fn message_position(&self, copy: usize, r: usize, c: usize) -> usize {
        let a0 = self.params.alpha0();
        let tri = a0 * (a0 + 1) / 2;
        let (half, r) = if r < a0 { (0, r) } else { (1, r - a0) };
        let (i, j) = if r <= c { (r, c) } else { (c, r) };
        // upper triangle, row-major
        let idx = i * a0 - i * i.saturating_sub(1) / 2 + (j - i);
        copy * 2 * tri + half * tri + idx
    }

    /// Node `node`'s α symbols.
    pub fn encode_node<K: Field>(&self, k: &K, msg: &[u64], node: usize) -> Vec<u64> {
        let a0 = self.params.alpha0();
        let psi = self.psi_row(node);
        let mut share = Vec::with_capacity(self.params.alpha);
        for copy in 0..self.params.m {
            for a in 0..a0 {
                let v = (0..self.params.d).fold(0, |acc, r| {
                    let x = msg[self.message_position(copy, r, a)];
                    k.add(acc, k.mul(psi[r], x))
                });
                share.push(v);
            }
        }
        share
    }

    /// Encodes B symbols of `k` (the code's field or an extension of it) into
    /// n shares of α symbols.
    pub fn encode_in<K: Field>(&self, k: &K, msg: &[u64]) -> Result<Vec<Vec<u64>>, CodeError> {
        if msg.len() != self.params.b {
            return Err(CodeError::LengthMismatch {
                expected: self.params.b,
                got: msg.len(),
            });
        }
        self.check_symbols(k, msg)?;
        Ok(self.nodes().map(|i| self.encode_node(k, msg, i)).collect())
    }

    pub fn encode(&self, msg: &[u64]) -> Result<Vec<Vec<u64>>, CodeError> {
        self.encode_in(&self.field, msg)
    }

    /// The β symbols helper `helper` sends toward `failed`: its share times φ_failed, per copy.
    pub fn repair_symbol_in<K: Field>(
        &self,
        k: &K,
        helper: usize,
        failed: usize,
        share: &[u64],
    ) -> Result<Vec<u64>, CodeError> {
        self.check_node(helper)?;
        self.check_node(failed)?;
        if helper == failed {
            return Err(CodeError::SelfRepair(helper));
        }
        if share.len() != self.params.alpha {
            return Err(CodeError::LengthMismatch {
                expected: self.params.alpha,
                got: share.len(),
            });
        }
        self.check_symbols(k, share)?;
        let phi = self.phi_row(failed);
        Ok(share
            .chunks(self.params.alpha0())
            .map(|w| w.iter().zip(phi).fold(0, |acc, (&s, &p)| k.add(acc, k.mul(s, p))))
            .collect())
    }

    pub fn repair_symbol(&self, helper: usize, failed: usize, share: &[u64]) -> Result<Vec<u64>, CodeError> {
        self.repair_symbol_in(&self.field, helper, failed, share)
    }

    /// Regenerates `failed`'s share from exactly d helpers' repair symbols
    /// (`symbols[j]` is what `helpers[j]` sent).
    /// A legal repair: `failed` known, exactly d distinct other helpers.
    pub fn check_helpers(&self, failed: usize, helpers: &[usize]) -> Result<(), CodeError> {
        self.check_node(failed)?;
        if helpers.len() != self.params.d {
            return Err(CodeError::WrongHelperCount {
                expected: self.params.d,
                got: helpers.len(),
            });
        }
        self.check_nodes(helpers)?;
        if helpers.contains(&failed) {
            return Err(CodeError::SelfRepair(failed));
        }
        Ok(())
    }

    pub fn repair_in<K: Field>(
        &self,
        k: &K,
        failed: usize,
        helpers: &[usize],
        symbols: &[Vec<u64>],
    ) -> Result<Vec<u64>, CodeError> {
        let d = self.params.d;
        self.check_helpers(failed, helpers)?;
        if symbols.len() != d {
            return Err(CodeError::LengthMismatch {
                expected: d,
                got: symbols.len(),
            });
        }
        for s in symbols {
            if s.len() != self.params.beta {
                return Err(CodeError::LengthMismatch {
                    expected: self.params.beta,
                    got: s.len(),
                });
            }
            self.check_symbols(k, s)?;
        }
        let idx: Vec<usize> = helpers.iter().map(|&h| h - 1).collect();
        let inv = self
            .psi
            .select_rows(&idx)
            .invert()
            .map_err(|_| CodeError::SingularSystem)?;
        let inv = lift(&inv, k);
        let a0 = self.params.alpha0();
        let lambda = self.lambda(failed);
        let mut share = Vec::with_capacity(self.params.alpha);
        for copy in 0..self.params.m {
            let y: Vec<u64> = symbols.iter().map(|s| s[copy]).collect();
            // z = M φ_f = (S1 φ_f, S2 φ_f)
            let z = inv.apply(&y).expect("dimensions checked");
            for a in 0..a0 {
                share.push(k.add(z[a], k.mul(lambda, z[a0 + a])));
            }
        }
        Ok(share)
    }

    pub fn repair(&self, failed: usize, helpers: &[usize], symbols: &[Vec<u64>]) -> Result<Vec<u64>, CodeError> {
        self.repair_in(&self.field, failed, helpers, symbols)
    }

    /// Recovers the B message symbols from the shares of exactly k nodes.
    pub fn reconstruct_in<K: Field>(&self, k: &K, shares: &[(usize, Vec<u64>)]) -> Result<Vec<u64>, CodeError> {
        if shares.len() != self.params.k {
            return Err(CodeError::WrongNodeCount {
                expected: self.params.k,
                got: shares.len(),
            });
        }
        let ids: Vec<usize> = shares.iter().map(|(i, _)| *i).collect();
        self.check_nodes(&ids)?;
        let mut values = Vec::with_capacity(self.params.b);
        for (_, s) in shares {
            if s.len() != self.params.alpha {
                return Err(CodeError::LengthMismatch {
                    expected: self.params.alpha,
                    got: s.len(),
                });
            }
            self.check_symbols(k, s)?;
            values.extend_from_slice(s);
        }
        let rows = self.observation_rows(&Selector::Stored(ids))?;
        let a = Matrix::from_rows(
            k.clone(),
            self.params.b,
            &rows.iter().map(|o| o.row.as_slice()).collect::<Vec<_>>(),
        )
        .expect("rows have width B");
        let rank = a.rank();
        if rank != self.params.b {
            return Err(CodeError::RankDeficient {
                rank,
                expected: self.params.b,
            });
        }
        let rhs = Matrix::new(k.clone(), values.len(), 1, values).expect("one value per row");
        let x = a.solve(&rhs).map_err(|_| CodeError::RankDeficient {
            rank,
            expected: self.params.b,
        })?;
        Ok(x.into_vec())
    }

    pub fn reconstruct(&self, shares: &[(usize, Vec<u64>)]) -> Result<Vec<u64>, CodeError> {
        self.reconstruct_in(&self.field, shares)
    }

    /// Coefficient rows of node `node`'s stored symbols.
    pub fn stored_rows(&self, node: usize) -> Vec<Observation> {
        let a0 = self.params.alpha0();
        let psi = self.psi_row(node);
        let mut out = Vec::with_capacity(self.params.alpha);
        for copy in 0..self.params.m {
            for a in 0..a0 {
                let mut row = vec![0u64; self.params.b];
                for (r, &coef) in psi.iter().enumerate() {
                    let pos = self.message_position(copy, r, a);
                    row[pos] = self.field.add(row[pos], coef);
                }
                out.push(Observation {
                    tag: ObsTag::Stored {
                        node,
                        slot: copy * a0 + a,
                    },
                    row,
                });
            }
        }
        out
    }

    /// Coefficient rows of the β symbols `helper` sends toward `failed`.
    pub fn repair_rows(&self, helper: usize, failed: usize, epoch: u64) -> Vec<Observation> {
        let f = &self.field;
        let psi = self.psi_row(helper);
        let phi = self.phi_row(failed);
        let mut out = Vec::with_capacity(self.params.beta);
        for copy in 0..self.params.m {
            let mut row = vec![0u64; self.params.b];
            for (r, &pr) in psi.iter().enumerate() {
                for (a, &pa) in phi.iter().enumerate() {
                    let pos = self.message_position(copy, r, a);
                    row[pos] = f.add(row[pos], f.mul(pr, pa));
                }
            }
            out.push(Observation {
                tag: ObsTag::Repair {
                    helper,
                    failed,
                    slot: copy,
                    epoch,
                },
                row,
            });
        }
        out
    }

    pub fn observation_rows(&self, selector: &Selector) -> Result<Vec<Observation>, CodeError> {
        let check = |nodes: &[usize]| -> Result<(), CodeError> {
            self.check_nodes(nodes)
                .map_err(|e| CodeError::BadSelector(e.to_string()))
        };
        Ok(match selector {
            Selector::Stored(nodes) => {
                check(nodes)?;
                nodes.iter().flat_map(|&i| self.stored_rows(i)).collect()
            }
            Selector::RepairTo(targets) => {
                check(targets)?;
                let all: Vec<usize> = self.nodes().collect();
                self.repair_from_to(&all, targets)
            }
            Selector::RepairFromTo(from, to) => {
                check(from)?;
                check(to)?;
                self.repair_from_to(from, to)
            }
        })
    }

    fn repair_from_to(&self, from: &[usize], to: &[usize]) -> Vec<Observation> {
        let mut out = Vec::new();
        for &f in to {
            for &i in from {
                if i != f {
                    out.extend(self.repair_rows(i, f, 0));
                }
            }
        }
        out
    }
}

/// Reinterprets an F-matrix over a field containing F.
pub(crate) fn lift<K: Field>(m: &Matrix<FieldSpec>, k: &K) -> Matrix<K> {
    Matrix::new(k.clone(), m.rows(), m.cols(), m.as_slice().to_vec()).expect("same shape")
}

fn default_points(field: &FieldSpec, n: usize, a0: usize) -> Option<Vec<u64>> {
    let g = field.generator();
    let consecutive: Vec<u64> = (1..=n).map(|i| field.pow(g, i as u128)).collect();
    if consecutive.iter().map(|&x| field.pow(x, a0 as u128)).all_unique() {
        return Some(consecutive);
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    let mut x = 1;
    for _ in 1..field.order() {
        x = field.mul(x, g);
        if seen.insert(field.pow(x, a0 as u128)) {
            out.push(x);
            if out.len() == n {
                return Some(out);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf16() -> FieldSpec {
        FieldSpec::new(2, 4, Some(vec![1, 1, 0, 0, 1])).unwrap()
    }

    fn code(n: usize, k: usize, m: usize) -> PmMsrCode {
        PmMsrCode::new(CodeParams::product_matrix(n, k, m).unwrap(), gf16(), None).unwrap()
    }

    fn random_msg(c: &PmMsrCode, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..c.params().b).map(|_| rng.gen_range(0..16)).collect()
    }

    #[test]
    fn parameters() {
        let p = code(5, 3, 1).params;
        assert_eq!((p.alpha, p.beta, p.b), (2, 1, 6));
        assert_eq!(p.cut_set(), p.b);
        let p = code(5, 3, 2).params;
        assert_eq!((p.alpha, p.beta, p.b), (4, 2, 12));
        assert_eq!(p.cut_set(), p.b);
        let err = PmMsrCode::new(CodeParams::product_matrix(17, 3, 1).unwrap(), gf16(), None).unwrap_err();
        assert!(matches!(err, CodeError::FieldTooSmall { n: 17, .. }));
        assert!(CodeParams::product_matrix(4, 3, 1).is_err());
    }

    #[test]
    fn explicit_points_are_validated() {
        let p = CodeParams::product_matrix(5, 3, 1).unwrap();
        assert!(PmMsrCode::new(p, gf16(), Some(vec![1, 2, 3, 4, 4])).is_err());
        assert!(PmMsrCode::new(p, gf16(), Some(vec![0, 2, 3, 4, 5])).is_err());
        assert!(PmMsrCode::new(p, gf16(), Some(vec![1, 2, 3, 4, 5])).is_ok());
        // GF(7): x^2 collides for x and -x
        let gf7 = FieldSpec::new(7, 1, None).unwrap();
        assert_eq!(
            PmMsrCode::new(p, gf7.clone(), Some(vec![1, 6, 2, 3, 4])).unwrap_err(),
            CodeError::DegenerateLambda(2)
        );
        // only three distinct squares among six nonzero elements
        assert_eq!(PmMsrCode::new(p, gf7, None).unwrap_err(), CodeError::DegenerateLambda(2));
        // GF(16)* has only five distinct cubes
        let p7 = CodeParams::product_matrix(7, 4, 1).unwrap();
        assert_eq!(PmMsrCode::new(p7, gf16(), None).unwrap_err(), CodeError::DegenerateLambda(3));
        let p6 = CodeParams::product_matrix(6, 3, 1).unwrap();
        assert_eq!(PmMsrCode::new(p6, gf16(), None).unwrap().points().len(), 6);
    }

    #[test]
    fn message_layout_is_a_bijection() {
        for m in 1..=3 {
            let c = code(5, 3, m);
            let a0 = c.params.alpha0();
            let mut hit = vec![0; c.params.b];
            for copy in 0..m {
                for r in 0..c.params.d {
                    for a in 0..a0 {
                        let half_row = r % a0;
                        if half_row <= a {
                            hit[c.message_position(copy, r, a)] += 1;
                        }
                    }
                }
            }
            assert!(hit.iter().all(|&h| h == 1), "{hit:?}");
        }
        // cubes collide in GF(16), so use GF(32)
        let gf32 = FieldSpec::new(2, 5, None).unwrap();
        let c = PmMsrCode::new(CodeParams::product_matrix(7, 4, 1).unwrap(), gf32, None).unwrap();
        let positions: Vec<usize> = (0..3).flat_map(|i| (i..3).map(move |j| (i, j))).map(|(i, j)| c.message_position(0, i, j)).collect();
        assert_eq!(positions, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(c.message_position(0, 2, 1), c.message_position(0, 1, 2));
    }

    #[test]
    fn unit_message_encoding() {
        let c = code(5, 3, 1);
        let mut msg = vec![0; 6];
        msg[0] = 1;
        let shares = c.encode(&msg).unwrap();
        for s in &shares {
            assert_eq!(s, &vec![1, 0]);
        }
        for i in 1..=5 {
            for f in 1..=5 {
                if i != f {
                    assert_eq!(c.repair_symbol(i, f, &shares[i - 1]).unwrap(), vec![1]);
                }
            }
        }
        assert!(c.encode(&vec![0; 6]).unwrap().iter().all(|s| s.iter().all(|&x| x == 0)));
        assert_eq!(
            c.encode(&[0; 5]).unwrap_err(),
            CodeError::LengthMismatch { expected: 6, got: 5 }
        );
    }

    #[test]
    fn shares_equal_psi_times_message_matrix() {
        let c = code(5, 3, 1);
        let f = gf16();
        let msg = random_msg(&c, 7);
        let mut mm = Matrix::zeros(f.clone(), 4, 2);
        for r in 0..4 {
            for a in 0..2 {
                mm.set(r, a, msg[c.message_position(0, r, a)]);
            }
        }
        let prod = c.psi().mul(&mm).unwrap();
        let shares = c.encode(&msg).unwrap();
        for i in 0..5 {
            assert_eq!(prod.row(i), shares[i].as_slice());
        }
    }

    #[test]
    fn repair_symbol_errors() {
        let c = code(5, 3, 1);
        assert_eq!(c.repair_symbol(2, 2, &[0, 0]).unwrap_err(), CodeError::SelfRepair(2));
        assert_eq!(c.repair_symbol(1, 2, &[0, 0]).unwrap(), vec![0]);
        let share = [3, 9];
        let phi = c.phi_row(4);
        let f = gf16();
        assert_eq!(
            c.repair_symbol(1, 4, &share).unwrap(),
            vec![f.add(f.mul(3, phi[0]), f.mul(9, phi[1]))]
        );
    }

    #[test]
    fn exact_repair_and_reconstruction() {
        for (n, m) in [(5, 1), (6, 1), (5, 2)] {
            let c = code(n, 3, m);
            let msg = random_msg(&c, n as u64 * 10 + m as u64);
            let shares = c.encode(&msg).unwrap();
            for f in c.nodes() {
                let others: Vec<usize> = c.nodes().filter(|&i| i != f).collect();
                let mut repaired = Vec::new();
                for helpers in others.iter().copied().combinations(c.params.d) {
                    let syms: Vec<Vec<u64>> = helpers
                        .iter()
                        .map(|&h| c.repair_symbol(h, f, &shares[h - 1]).unwrap())
                        .collect();
                    let share = c.repair(f, &helpers, &syms).unwrap();
                    assert_eq!(share, shares[f - 1]);
                    repaired.push(share);
                }
                assert!(repaired.windows(2).all(|w| w[0] == w[1]));
            }
            for set in c.nodes().combinations(3) {
                let sub: Vec<(usize, Vec<u64>)> = set.iter().map(|&i| (i, shares[i - 1].clone())).collect();
                assert_eq!(c.reconstruct(&sub).unwrap(), msg);
            }
        }
    }

    #[test]
    fn repair_and_reconstruct_errors() {
        let c = code(5, 3, 1);
        let z = vec![vec![0]; 3];
        assert_eq!(
            c.repair(1, &[2, 3, 4], &z).unwrap_err(),
            CodeError::WrongHelperCount { expected: 4, got: 3 }
        );
        assert_eq!(c.repair(1, &[1, 2, 3, 4], &vec![vec![0]; 4]).unwrap_err(), CodeError::SelfRepair(1));
        assert_eq!(c.repair(1, &[2, 3, 4, 5], &vec![vec![0]; 4]).unwrap(), vec![0, 0]);
        assert_eq!(
            c.reconstruct(&[(1, vec![0, 0]), (2, vec![0, 0])]).unwrap_err(),
            CodeError::WrongNodeCount { expected: 3, got: 2 }
        );
        assert_eq!(
            c.reconstruct(&[(1, vec![0, 0]), (1, vec![0, 0]), (2, vec![0, 0])]).unwrap_err(),
            CodeError::DuplicateNode(1)
        );
        assert_eq!(
            c.reconstruct(&[(1, vec![0, 0]), (2, vec![0, 0]), (3, vec![0, 0])]).unwrap(),
            vec![0; 6]
        );
        assert_eq!(c.reconstruct(&[(1, vec![0, 0]), (2, vec![0, 0]), (9, vec![0, 0])]).unwrap_err(), CodeError::UnknownNode(9));
    }

    #[test]
    fn observation_rows_evaluate_to_symbols() {
        let c = code(6, 3, 2);
        let f = gf16();
        let msg = random_msg(&c, 99);
        let shares = c.encode(&msg).unwrap();
        let dot = |row: &[u64]| row.iter().zip(&msg).fold(0, |acc, (&a, &x)| f.add(acc, f.mul(a, x)));
        for i in c.nodes() {
            for (slot, obs) in c.stored_rows(i).iter().enumerate() {
                assert_eq!(dot(&obs.row), shares[i - 1][slot]);
            }
            for j in c.nodes().filter(|&j| j != i) {
                let sym = c.repair_symbol(i, j, &shares[i - 1]).unwrap();
                let rows = c.repair_rows(i, j, 0);
                assert_eq!(rows.iter().map(|o| dot(&o.row)).collect::<Vec<_>>(), sym);
            }
        }
    }

    #[test]
    fn selector_counts_and_ranks() {
        let c = code(5, 3, 1);
        let rank = |sel: Selector| {
            let rows = c.observation_rows(&sel).unwrap();
            let m = Matrix::from_rows(gf16(), 6, &rows.iter().map(|o| o.row.clone()).collect::<Vec<_>>()).unwrap();
            (rows.len(), m.rank())
        };
        assert_eq!(rank(Selector::Stored(vec![2])), (2, 2));
        assert_eq!(rank(Selector::RepairTo(vec![1])), (4, 4));
        assert_eq!(rank(Selector::Stored(vec![])), (0, 0));
        assert_eq!(rank(Selector::Stored(vec![1, 2, 3])), (6, 6));
        assert!(matches!(
            c.observation_rows(&Selector::Stored(vec![6])),
            Err(CodeError::BadSelector(_))
        ));
        assert!(matches!(
            c.observation_rows(&Selector::RepairTo(vec![0])),
            Err(CodeError::BadSelector(_))
        ));
    }

    #[test]
    fn truncation_keeps_points() {
        let c = code(6, 3, 1);
        let t = c.truncate(5).unwrap();
        assert_eq!(t.points(), &c.points()[..5]);
        assert_eq!(t.stored_rows(3), c.stored_rows(3));
        assert!(c.truncate(4).is_err());
    }
}
