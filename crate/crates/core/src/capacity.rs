//! Closed-form secrecy capacity of linear MSR codes and the bounds it is
//! compared against. All values are exact rationals.
//!
//! The leakage term π(β, l₂) splits parameter space in two. With
//! t = ⌈(d-k+1)/β⌉:
//!
//! * Category 1 (l₂ ≤ t): π = l₂β exactly.
//! * Category 2 (l₂ = t + e, e ≥ 1): π ≥ tβ + β(d-k-t+1)[1 - ((d-k)/(d-k+1))^e],
//!   so the capacity (k-l₁-l₂)(α-π) is only an upper bound.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CapacityError {
    #[error("bad query: {0}")]
    BadQuery(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CapacityQuery {
    pub k: usize,
    pub d: usize,
    pub n: usize,
    pub alpha: usize,
    pub beta: usize,
    pub l1: usize,
    pub l2: usize,
}

impl CapacityQuery {
    /// Query at the MSR point α = (d-k+1)β.
    pub fn msr(k: usize, d: usize, n: usize, beta: usize, l1: usize, l2: usize) -> Result<Self, CapacityError> {
        let q = CapacityQuery {
            k,
            d,
            n,
            alpha: (d + 1).saturating_sub(k) * beta,
            beta,
            l1,
            l2,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), CapacityError> {
        let bad = |s: &str| Err(CapacityError::BadQuery(s.to_string()));
        if self.k == 0 || self.beta == 0 {
            return bad("k and β must be positive");
        }
        if self.d < self.k {
            return bad("d must be at least k");
        }
        if self.n < self.d + 1 {
            return bad("n must be at least d + 1");
        }
        if self.alpha != (self.d - self.k + 1) * self.beta {
            return bad("α must equal (d-k+1)β");
        }
        if self.l1 + self.l2 > self.k - 1 {
            return bad("l1 + l2 must be at most k - 1");
        }
        Ok(())
    }

    fn gap(&self) -> usize {
        self.d - self.k + 1
    }

    /// t = ⌈(d-k+1)/β⌉.
    pub fn t(&self) -> usize {
        self.gap().div_ceil(self.beta)
    }

    /// Category 1 iff l₂ < 1 + (d-k+1)/β, i.e. β(l₂-1) < d-k+1.
    pub fn category(&self) -> Category {
        if self.l2 == 0 || self.beta * (self.l2 - 1) < self.gap() {
            Category::Cat1
        } else {
            Category::Cat2
        }
    }

    fn secure_nodes(&self) -> BigRational {
        int((self.k - self.l1 - self.l2) as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    Cat1,
    Cat2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Exact,
    LowerBound,
    UpperBound,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::Exact => "exact",
            Bound::LowerBound => "lower_bound",
            Bound::UpperBound => "upper_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityValue {
    pub value: BigRational,
    pub kind: Bound,
    pub category: Category,
    /// Present for Category 2.
    pub t: Option<usize>,
    pub e: Option<usize>,
}

impl CapacityValue {
    /// Whether a measured secure size is consistent with this value.
    pub fn admits(&self, measured: usize) -> bool {
        let m = int(measured as i64);
        match self.kind {
            Bound::Exact => m == self.value,
            Bound::UpperBound => m <= self.value,
            Bound::LowerBound => m >= self.value,
        }
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn clamp0(v: BigRational) -> BigRational {
    if v.is_negative() {
        BigRational::zero()
    } else {
        v
    }
}

/// π(β, l₂), the leakage per secure node attributable to repair traffic.
pub fn pi(q: &CapacityQuery) -> Result<CapacityValue, CapacityError> {
    q.validate()?;
    let beta = int(q.beta as i64);
    match q.category() {
        Category::Cat1 => Ok(CapacityValue {
            value: int((q.l2 * q.beta) as i64),
            kind: Bound::Exact,
            category: Category::Cat1,
            t: None,
            e: None,
        }),
        Category::Cat2 => {
            let t = q.t();
            let e = q.l2 - t;
            let dk = (q.d - q.k) as i64;
            let ratio = frac(dk, dk + 1);
            let decay = BigRational::one() - num_traits::pow(ratio, e);
            let value = int(t as i64) * &beta + &beta * int(dk - t as i64 + 1) * decay;
            Ok(CapacityValue {
                value,
                kind: Bound::LowerBound,
                category: Category::Cat2,
                t: Some(t),
                e: Some(e),
            })
        }
    }
}

/// B^(s) = (k - l₁ - l₂)(α - π(β, l₂)); exact in Category 1, an upper bound in Category 2.
pub fn secrecy_capacity(q: &CapacityQuery) -> Result<CapacityValue, CapacityError> {
    let p = pi(q)?;
    let value = q.secure_nodes() * (int(q.alpha as i64) - &p.value);
    Ok(CapacityValue {
        value,
        kind: match p.kind {
            Bound::Exact => Bound::Exact,
            _ => Bound::UpperBound,
        },
        ..p
    })
}

/// One named row of the comparison table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedBound {
    pub name: &'static str,
    pub value: BigRational,
    pub kind: Bound,
}

/// Every comparison value for one query. Rows that do not apply are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsTable {
    pub query: CapacityQuery,
    /// Σ_{i=l+1}^{k} min(α, (d-i+1)β) with l = l₁ + l₂.
    pub cutset: BigRational,
    /// (k-l₁-l₂)α.
    pub pawar: BigRational,
    /// (k-l₂)(1-1/d)α, for n = d+1, l₁ = 0, 1 ≤ l₂ < k.
    pub tandon: Option<BigRational>,
    /// (k-l₁-l₂)(α-l₂β), achieved by secure product-matrix codes.
    pub shah: BigRational,
    /// (k-l₁-l₂)(α-θ(β,l₂)) for l₂ ∈ {1, 2}.
    pub rawat: Option<BigRational>,
    /// (k-l₁-l₂)(1-1/(d+1-k))^l₂ α.
    pub goparaju: BigRational,
    /// The closed-form capacity (exact or upper bound).
    pub explicit: CapacityValue,
}

impl BoundsTable {
    pub fn named(&self) -> Vec<NamedBound> {
        let ub = |name, value: &BigRational| NamedBound {
            name,
            value: value.clone(),
            kind: Bound::UpperBound,
        };
        let mut out = vec![ub("cutset", &self.cutset), ub("pawar", &self.pawar)];
        if let Some(t) = &self.tandon {
            out.push(ub("tandon", t));
        }
        out.push(NamedBound {
            name: "shah",
            value: self.shah.clone(),
            kind: Bound::Exact,
        });
        if let Some(r) = &self.rawat {
            out.push(ub("rawat", r));
        }
        out.push(ub("goparaju", &self.goparaju));
        out.push(NamedBound {
            name: "this_paper",
            value: self.explicit.value.clone(),
            kind: self.explicit.kind,
        });
        out
    }

    pub fn csv_row(&self) -> String {
        let q = &self.query;
        let opt = |v: &Option<BigRational>| v.as_ref().map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            q.k,
            q.d,
            q.n,
            q.alpha,
            q.beta,
            q.l1,
            q.l2,
            self.cutset,
            self.pawar,
            opt(&self.tandon),
            self.shah,
            opt(&self.rawat),
            self.goparaju,
            self.explicit.value,
            self.explicit.kind
        )
    }
}

pub const CSV_HEADER: &str = "k,d,n,alpha,beta,l1,l2,cutset,pawar,tandon,shah,rawat,goparaju,this_paper,kind";

pub fn bounds_table(q: &CapacityQuery) -> Result<BoundsTable, CapacityError> {
    q.validate()?;
    let alpha = int(q.alpha as i64);
    let beta = int(q.beta as i64);
    let secure = q.secure_nodes();
    let l = q.l1 + q.l2;
    let cutset = ((l + 1)..=q.k)
        .map(|i| q.alpha.min((q.d + 1 - i) * q.beta))
        .sum::<usize>();
    let tandon = (q.n == q.d + 1 && q.l1 == 0 && q.l2 >= 1 && q.l2 < q.k).then(|| {
        int((q.k - q.l2) as i64) * (BigRational::one() - frac(1, q.d as i64)) * &alpha
    });
    let shah = clamp0(&secure * (&alpha - int(q.l2 as i64) * &beta));
    let rawat = match q.l2 {
        1 => Some(beta.clone()),
        2 => Some(int(2) * &beta - &beta / int(q.gap() as i64)),
        _ => None,
    }
    .map(|theta| clamp0(&secure * (&alpha - theta)));
    let shrink = BigRational::one() - frac(1, q.gap() as i64);
    let goparaju = &secure * num_traits::pow(shrink, q.l2) * &alpha;
    Ok(BoundsTable {
        query: *q,
        cutset: int(cutset as i64),
        pawar: &secure * &alpha,
        tandon,
        shah,
        rawat,
        goparaju,
        explicit: secrecy_capacity(q)?,
    })
}

/// Header plus one line per query; byte-stable for equal input.
pub fn capacity_csv(queries: &[CapacityQuery]) -> Result<String, CapacityError> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for q in queries {
        out.push_str(&bounds_table(q)?.csv_row());
        out.push('\n');
    }
    Ok(out)
}
