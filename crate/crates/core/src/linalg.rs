//! Fraction-free row echelon forms over ℚ.
//!
//! Stored rows are primitive integer vectors; each new row is reduced against existing
//! pivots by integer cross-multiplication followed by content removal. Each row also
//! remembers which input vectors it came from, so a membership test can hand back an
//! explicit rational combination of the inputs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::formal::Scalar;

#[derive(Debug, Clone)]
struct Row {
    pivot: usize,
    data: Vec<BigInt>,
    /// row = Σ comb[id] · input[id]
    comb: BTreeMap<usize, Scalar>,
}

#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Row>,
    pivot_row: BTreeMap<usize, usize>,
    track: bool,
}

/// Scales a rational vector to a primitive integer vector; returns it with the factor used.
pub fn primitive(v: &[Scalar]) -> (Vec<BigInt>, Scalar) {
    let mut l = BigInt::one();
    for x in v {
        if !x.is_zero() {
            l = l.lcm(x.denom());
        }
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x.numer() * &l) / x.denom()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        if !x.is_zero() {
            g = g.gcd(x);
        }
    }
    if g.is_zero() {
        return (ints, Scalar::one());
    }
    // make the leading entry positive
    if ints.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false) {
        g = -g;
    }
    let ints = ints.into_iter().map(|x| x / &g).collect();
    (ints, Scalar::new(l, g))
}

impl Echelon {
    pub fn new(ncols: usize, track: bool) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_row: BTreeMap::new(), track }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Inserts input `id`; returns true when the rank grew.
    pub fn insert(&mut self, id: usize, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let (mut data, factor) = primitive(v);
        let mut comb = BTreeMap::new();
        if self.track {
            comb.insert(id, factor);
        }
        for (&p, &ri) in &self.pivot_row {
            if data[p].is_zero() {
                continue;
            }
            let row = &self.rows[ri];
            let g = data[p].gcd(&row.data[p]);
            let a = &row.data[p] / &g;
            let b = &data[p] / &g;
            for (x, y) in data.iter_mut().zip(&row.data) {
                if !y.is_zero() {
                    *x = &*x * &a - y * &b;
                } else if !x.is_zero() {
                    *x *= &a;
                }
            }
            if self.track {
                let a = Scalar::from_integer(a);
                let b = Scalar::from_integer(b);
                for c in comb.values_mut() {
                    *c *= &a;
                }
                for (k, c) in &row.comb {
                    let e = comb.entry(*k).or_insert_with(Scalar::zero);
                    *e -= c * &b;
                }
                comb.retain(|_, c| !c.is_zero());
            }
            normalize(&mut data, &mut comb);
        }
        let Some(pivot) = data.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(Row { pivot, data, comb });
        true
    }

    /// Reduces `v`; when it lies in the row space returns the combination of inputs.
    pub fn solve(&self, v: &[Scalar]) -> Option<BTreeMap<usize, Scalar>> {
        let mut t = v.to_vec();
        let mut witness: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (&p, &ri) in &self.pivot_row {
            if t[p].is_zero() {
                continue;
            }
            let row = &self.rows[ri];
            let f = &t[p] / Scalar::from_integer(row.data[p].clone());
            for (x, y) in t.iter_mut().zip(&row.data) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            for (k, c) in &row.comb {
                *witness.entry(*k).or_insert_with(Scalar::zero) += c * &f;
            }
        }
        if t.iter().all(|x| x.is_zero()) {
            witness.retain(|_, c| !c.is_zero());
            Some(witness)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut t = v.to_vec();
        for (&p, &ri) in &self.pivot_row {
            if t[p].is_zero() {
                continue;
            }
            let row = &self.rows[ri];
            let f = &t[p] / Scalar::from_integer(row.data[p].clone());
            for (x, y) in t.iter_mut().zip(&row.data) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        t.iter().all(|x| x.is_zero())
    }

    /// Remainder of `v` with every pivot entry cleared; equal for vectors congruent mod the row space.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut t = v.to_vec();
        for (&p, &ri) in &self.pivot_row {
            if t[p].is_zero() {
                continue;
            }
            let row = &self.rows[ri];
            let f = &t[p] / Scalar::from_integer(row.data[p].clone());
            for (x, y) in t.iter_mut().zip(&row.data) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        t
    }

    /// The unique reduced row-echelon basis of the row space, pivots normalized to 1.
    pub fn rref(&self) -> Vec<Vec<Scalar>> {
        let mut rows: Vec<Vec<Scalar>> = self
            .pivot_row
            .values()
            .map(|&ri| {
                let r = &self.rows[ri];
                let lead = Scalar::from_integer(r.data[r.pivot].clone());
                r.data.iter().map(|x| Scalar::from_integer(x.clone()) / &lead).collect()
            })
            .collect();
        let pivots: Vec<usize> = self.pivot_row.keys().copied().collect();
        for i in (0..rows.len()).rev() {
            let p = pivots[i];
            for j in 0..i {
                if rows[j][p].is_zero() {
                    continue;
                }
                let f = rows[j][p].clone();
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in head[j].iter_mut().zip(&tail[0]) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        rows
    }

    /// Basis of {x : r·x = 0 for every row r}.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let rref = self.rref();
        let pivots: Vec<usize> = self.pivot_row.keys().copied().collect();
        let mut out = Vec::new();
        for free in 0..self.ncols {
            if self.pivot_row.contains_key(&free) {
                continue;
            }
            let mut x = vec![Scalar::zero(); self.ncols];
            x[free] = Scalar::one();
            for (r, &p) in rref.iter().zip(&pivots) {
                x[p] = -r[free].clone();
            }
            out.push(x);
        }
        out
    }
}

fn normalize(data: &mut [BigInt], comb: &mut BTreeMap<usize, Scalar>) {
    let mut g = BigInt::zero();
    for x in data.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in data.iter_mut() {
        *x /= &g;
    }
    let gs = Scalar::from_integer(g);
    for c in comb.values_mut() {
        *c /= &gs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::{frac, int};

    #[test]
    fn witness_reproduces_target() {
        let a = vec![int(1), frac(1, 2), int(0)];
        let b = vec![int(0), int(3), int(-1)];
        let mut e = Echelon::new(3, true);
        assert!(e.insert(0, &a));
        assert!(e.insert(1, &b));
        assert!(!e.insert(2, &[int(2), int(4), int(-1)]));
        let target = vec![int(2), frac(-2, 1), int(1)];
        let w = e.solve(&target).unwrap();
        let mut back = vec![Scalar::zero(); 3];
        for (id, c) in &w {
            let v = if *id == 0 { &a } else { &b };
            for (x, y) in back.iter_mut().zip(v) {
                *x += c * y;
            }
        }
        assert_eq!(back, target);
        assert!(e.solve(&[int(0), int(0), int(1)]).is_none());
    }

    #[test]
    fn rref_is_order_independent() {
        let vs = [vec![int(1), int(2), int(3)], vec![int(2), int(4), int(7)], vec![int(0), int(0), int(5)]];
        let mut e1 = Echelon::new(3, false);
        let mut e2 = Echelon::new(3, false);
        for (i, v) in vs.iter().enumerate() {
            e1.insert(i, v);
        }
        for (i, v) in vs.iter().enumerate().rev() {
            e2.insert(i, v);
        }
        assert_eq!(e1.rref(), e2.rref());
        assert_eq!(e1.kernel().len(), 1);
    }
}
