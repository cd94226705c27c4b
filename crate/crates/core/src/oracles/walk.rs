use super::{OracleError, OracleResult};
use crate::topology::{neighbor_vec, CellRef, GridSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

/// Exact reduced fraction with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Probability that a uniform random neighbour walk from `a`, absorbed at
/// `b`, visits `c` at least once.
///
/// Over states (cell, visited-c) every flagged state is eventually absorbed
/// at `b` with probability one, so the value equals the probability of
/// hitting `c` before `b`. That is the harmonic function with h(b) = 0 and
/// h(c) = 1, solved exactly over the component of `a`.
pub fn walk_pass_probability(spec: &GridSpec, a: CellRef, b: CellRef, c: CellRef) -> OracleResult<Rational> {
    spec.check(a)?;
    spec.check(b)?;
    spec.check(c)?;
    if a == b || b == c {
        return Err(OracleError::Precondition("A, B and C must be distinct from B".into()));
    }
    if a == c {
        return Ok(Rational::one());
    }
    // component of a
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::from([a]);
    seen.insert(a, ());
    while let Some(u) = queue.pop_front() {
        for v in neighbor_vec(u, spec) {
            if seen.insert(v, ()).is_none() {
                queue.push_back(v);
            }
        }
    }
    if !seen.contains_key(&b) {
        return Err(OracleError::Unreachable(format!("B {b} is not reachable from A {a}")));
    }
    if !seen.contains_key(&c) {
        return Ok(Rational::zero());
    }
    let unknowns: Vec<CellRef> = seen.keys().copied().filter(|&v| v != b && v != c).collect();
    let index: BTreeMap<CellRef, usize> = unknowns.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = unknowns.len();
    // rows: deg(v) h(v) - sum_{u~v, u unknown} h(u) = #{u~v : u == c}
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n];
    for (i, &v) in unknowns.iter().enumerate() {
        let nb = neighbor_vec(v, spec);
        m[i][i] = BigRational::from_integer(BigInt::from(nb.len()));
        for u in nb {
            if u == c {
                m[i][n] += BigRational::one();
            } else if let Some(&j) = index.get(&u) {
                m[i][j] -= BigRational::one();
            }
        }
    }
    let solution = solve_linear(m)?;
    Ok(Rational(solution[index[&a]].clone()))
}

fn solve_linear(mut m: Vec<Vec<BigRational>>) -> OracleResult<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| OracleError::Precondition("singular hitting system".into()))?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for k in col..=n {
            m[col][k] = &m[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for k in col..=n {
                    let delta = &factor * &m[col][k];
                    m[r][k] -= delta;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}
