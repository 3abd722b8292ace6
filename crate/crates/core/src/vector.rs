//! Normal-ordered monomials and sparse rational combinations of them.
//!
//! A basis vector g₁(-k₁)g₂(-k₂)...|lw⟩ is stored as its list of (generator, k) with
//! k non-increasing. The lowest-weight vector itself (vacuum or |λ⟩ or v_h) is the
//! empty list; which one is meant is a property of the module, not of the vector.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal::{parse_scalar, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    /// Heisenberg field α, weight 1, α_{(n)} = α(n).
    Alpha,
    /// Virasoro field ω, weight 2, ω_{(n)} = L(n-1).
    L,
}

impl Generator {
    pub fn weight(self) -> i64 {
        match self {
            Generator::Alpha => 1,
            Generator::L => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Generator::Alpha => "a",
            Generator::L => "L",
        }
    }

    /// Vertex-algebra index m with g(-k) = g_{(m)}.
    pub fn creation_index(self, k: u32) -> i64 {
        match self {
            Generator::Alpha => -(k as i64),
            Generator::L => 1 - k as i64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BasisVector {
    modes: Vec<(Generator, u32)>,
}

impl BasisVector {
    pub fn lowest() -> Self {
        BasisVector { modes: Vec::new() }
    }

    /// Builds a canonical monomial, sorting the parts.
    pub fn new(mut modes: Vec<(Generator, u32)>) -> Self {
        modes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        BasisVector { modes }
    }

    pub fn of(g: Generator, parts: &[u32]) -> Self {
        Self::new(parts.iter().map(|&k| (g, k)).collect())
    }

    pub fn modes(&self) -> &[(Generator, u32)] {
        &self.modes
    }

    pub fn is_lowest(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn depth(&self) -> u32 {
        self.modes.iter().map(|(_, k)| k).sum()
    }

    pub fn first(&self) -> Option<(Generator, u32)> {
        self.modes.first().copied()
    }

    pub fn rest(&self) -> BasisVector {
        BasisVector { modes: self.modes[1..].to_vec() }
    }

    pub fn prepend_unchecked(&self, g: Generator, k: u32) -> BasisVector {
        let mut modes = Vec::with_capacity(self.modes.len() + 1);
        modes.push((g, k));
        modes.extend_from_slice(&self.modes);
        BasisVector { modes }
    }

    pub fn multiplicity(&self, g: Generator, k: u32) -> usize {
        self.modes.iter().filter(|&&m| m == (g, k)).count()
    }

    pub fn without_one(&self, g: Generator, k: u32) -> BasisVector {
        let mut modes = self.modes.clone();
        let pos = modes.iter().position(|&m| m == (g, k)).expect("part present");
        modes.remove(pos);
        BasisVector { modes }
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.modes.iter().map(|(g, _)| *g)
    }

    /// Parses the `Display` form, e.g. `L(-3)L(-2)` or `a(-1)^2` or `1`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("cannot parse monomial {s:?}"));
        let mut rest = s.trim();
        if rest.is_empty() || rest == "1" || rest == "|0>" {
            return Ok(Self::lowest());
        }
        let mut modes = Vec::new();
        while !rest.is_empty() {
            let g = match rest.as_bytes()[0] {
                b'a' => Generator::Alpha,
                b'L' => Generator::L,
                _ => return Err(bad()),
            };
            let open = rest.find("(-").ok_or_else(bad)?;
            let close = rest.find(')').ok_or_else(bad)?;
            if open != 1 || close < open {
                return Err(bad());
            }
            let k: u32 = rest[open + 2..close].parse().map_err(|_| bad())?;
            rest = &rest[close + 1..];
            let mut times = 1;
            if let Some(tail) = rest.strip_prefix('^') {
                let end = tail.find(|c: char| !c.is_ascii_digit()).unwrap_or(tail.len());
                times = tail[..end].parse().map_err(|_| bad())?;
                rest = &tail[end..];
            }
            if k == 0 {
                return Err(bad());
            }
            for _ in 0..times {
                modes.push((g, k));
            }
            rest = rest.trim_start();
        }
        Ok(Self::new(modes))
    }
}

impl Ord for BasisVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth().cmp(&other.depth()).then_with(|| self.modes.cmp(&other.modes))
    }
}

impl PartialOrd for BasisVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modes.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        while i < self.modes.len() {
            let m = self.modes[i];
            let mut j = i;
            while j < self.modes.len() && self.modes[j] == m {
                j += 1;
            }
            write!(f, "{}(-{})", m.0.symbol(), m.1)?;
            if j - i > 1 {
                write!(f, "^{}", j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Sparse combination of basis vectors with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct GradedVector {
    terms: BTreeMap<BasisVector, Scalar>,
}

impl GradedVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: BasisVector) -> Self {
        Self::term(b, Scalar::one())
    }

    pub fn lowest() -> Self {
        Self::basis(BasisVector::lowest())
    }

    pub fn term(b: BasisVector, c: Scalar) -> Self {
        let mut v = Self::zero();
        v.add_term(b, c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisVector, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: &BasisVector) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, b: BasisVector, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&b) {
            Some(cur) => {
                *cur += c;
                if cur.is_zero() {
                    self.terms.remove(&b);
                }
            }
            None => {
                self.terms.insert(b, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GradedVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (b, x) in &other.terms {
            self.add_term(b.clone(), x * c);
        }
    }

    pub fn add_assign(&mut self, other: &GradedVector) {
        self.add_scaled(other, &Scalar::one());
    }

    pub fn scaled(&self, c: &Scalar) -> GradedVector {
        let mut out = GradedVector::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn plus(&self, other: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    pub fn max_depth(&self) -> Option<u32> {
        self.terms.keys().map(|b| b.depth()).max()
    }

    /// Splits into homogeneous pieces keyed by depth.
    pub fn components(&self) -> BTreeMap<u32, GradedVector> {
        let mut out: BTreeMap<u32, GradedVector> = BTreeMap::new();
        for (b, c) in &self.terms {
            out.entry(b.depth()).or_default().add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn component(&self, depth: u32) -> GradedVector {
        let mut out = GradedVector::zero();
        for (b, c) in &self.terms {
            if b.depth() == depth {
                out.add_term(b.clone(), c.clone());
            }
        }
        out
    }

    /// Parses a list of (monomial, coefficient) pairs as used by element files.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut v = GradedVector::zero();
        for (m, c) in pairs {
            v.add_term(BasisVector::parse(m)?, parse_scalar(c)?);
        }
        Ok(v)
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        self.terms.iter().map(|(b, c)| (b.to_string(), crate::formal::scalar_to_string(c))).collect()
    }
}

impl FromIterator<(BasisVector, Scalar)> for GradedVector {
    fn from_iter<I: IntoIterator<Item = (BasisVector, Scalar)>>(iter: I) -> Self {
        let mut v = GradedVector::zero();
        for (b, c) in iter {
            v.add_term(b, c);
        }
        v
    }
}

impl fmt::Display for GradedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(b, c)| format!("({c}){b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
