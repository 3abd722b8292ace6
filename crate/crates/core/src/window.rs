//! Subspaces of a finite depth window spanned by residue-type generators.
//!
//! A window is the span of basis vectors of depth ≤ D. The family (L(-1)+L(0)_s)b, for b
//! of depth < D and nonzero weight, is handled without row reduction: its member for b
//! equals wt(b)·b plus terms one level deeper, so it is triangular in b and can be used to
//! clear column b directly. Everything else is reduced in the leftover coordinates,
//! essentially the top depth, with a fraction-free echelon form.
//!
//! Generators are pulled from a source lazily, in the source's canonical order, until a
//! query is decided or the source runs dry. Rows depend only on that order, so the
//! witness for a vector does not depend on which queries happened first.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::formal::Scalar;
use crate::linalg::Echelon;
use crate::vector::{BasisVector, GradedVector};
use crate::voa::Module;

/// Canonically ordered generator list for a subspace.
pub trait GeneratorSource: Send + Sync {
    fn len(&self) -> usize;
    fn label(&self, i: usize) -> String;
    fn expand(&self, i: usize) -> GradedVector;
}

#[derive(Debug)]
pub struct Window {
    pub module: Arc<Module>,
    pub depth: u32,
    pub basis: Vec<BasisVector>,
    index: HashMap<BasisVector, usize>,
}

impl Window {
    pub fn new(module: Arc<Module>, depth: u32) -> Self {
        let basis = module.basis_up_to(depth);
        let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        Window { module, depth, basis, index }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// True when every monomial of v is a basis vector of this window.
    pub fn contains(&self, v: &GradedVector) -> bool {
        v.terms().all(|(b, _)| self.index.contains_key(b))
    }

    pub fn column(&self, b: &BasisVector) -> Option<usize> {
        self.index.get(b).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Certified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipCert {
    pub status: Status,
    /// (generator label, coefficient) with the vector equal to Σ coefficient·generator.
    pub witness: Vec<(String, String)>,
    pub window: u32,
}

impl MembershipCert {
    pub fn certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn inconclusive(window: u32) -> Self {
        MembershipCert { status: Status::Inconclusive, witness: Vec::new(), window }
    }
}

pub struct WindowSubspace {
    pub window: Arc<Window>,
    shift_family: bool,
    /// Columns cleared by the (L(-1)+L(0)_s) family.
    eliminated: Vec<bool>,
    residual: Vec<Option<usize>>,
    nres: usize,
    echelon: Echelon,
    source: Box<dyn GeneratorSource>,
    /// Generators already pulled, by position in the source.
    pulled: Vec<GradedVector>,
    l_minus1: HashMap<BasisVector, GradedVector>,
    /// Echelon over reversed columns, built on the first `reduce`.
    low_first: Option<Echelon>,
}

const BATCH: usize = 48;

impl WindowSubspace {
    pub fn new(window: Arc<Window>, shift_family: bool, source: Box<dyn GeneratorSource>) -> Self {
        let h = window.module.lowest_weight();
        let eliminated: Vec<bool> = window
            .basis
            .iter()
            .map(|b| shift_family && b.depth() < window.depth && !(h.clone() + Scalar::from_integer(b.depth().into())).is_zero())
            .collect();
        let mut residual = vec![None; window.dim()];
        let mut nres = 0;
        for (i, e) in eliminated.iter().enumerate() {
            if !e {
                residual[i] = Some(nres);
                nres += 1;
            }
        }
        let mut l_minus1 = HashMap::new();
        if shift_family {
            let bs: Vec<&BasisVector> = window.basis.iter().zip(&eliminated).filter(|(_, e)| **e).map(|(b, _)| b).collect();
            let images: Vec<GradedVector> =
                bs.par_iter().map(|b| window.module.l_minus1(&GradedVector::basis((*b).clone()))).collect();
            l_minus1 = bs.into_iter().cloned().zip(images).collect();
        }
        WindowSubspace {
            echelon: Echelon::new(nres, true),
            window,
            shift_family,
            eliminated,
            residual,
            nres,
            source,
            pulled: Vec::new(),
            l_minus1,
            low_first: None,
        }
    }

    pub fn depth(&self) -> u32 {
        self.window.depth
    }

    fn shift_generator(&self, b: &BasisVector) -> GradedVector {
        let mut g = self.l_minus1[b].clone();
        g.add_term(b.clone(), self.window.module.weight(b));
        g
    }

    /// Clears eliminated columns; returns leftover coordinates and the multipliers used.
    fn normal_form(&self, x: &GradedVector) -> (Vec<Scalar>, BTreeMap<BasisVector, Scalar>) {
        let mut x = x.clone();
        let mut used = BTreeMap::new();
        if self.shift_family {
            for d in 0..self.window.depth {
                let layer: Vec<(BasisVector, Scalar)> =
                    x.terms().filter(|(b, _)| b.depth() == d).map(|(b, c)| (b.clone(), c.clone())).collect();
                for (b, c) in layer {
                    let col = self.window.column(&b).expect("vector inside window");
                    if !self.eliminated[col] {
                        continue;
                    }
                    let s = c / self.window.module.weight(&b);
                    x.add_scaled(&self.shift_generator(&b), &-s.clone());
                    used.insert(b, s);
                }
            }
        }
        let mut out = vec![Scalar::zero(); self.nres];
        for (b, c) in x.terms() {
            let col = self.window.column(b).expect("vector inside window");
            let r = self.residual[col].expect("eliminated columns were cleared");
            out[r] = c.clone();
        }
        (out, used)
    }

    fn pull_batch(&mut self) -> bool {
        let start = self.pulled.len();
        let end = (start + BATCH).min(self.source.len());
        if start >= end {
            return false;
        }
        let source = &self.source;
        let expanded: Vec<GradedVector> = (start..end).into_par_iter().map(|i| source.expand(i)).collect();
        for (off, g) in expanded.into_iter().enumerate() {
            assert!(self.window.contains(&g), "generator {} leaves the window", self.source.label(start + off));
            let (nf, _) = self.normal_form(&g);
            self.echelon.insert(start + off, &nf);
            self.pulled.push(g);
        }
        true
    }

    /// Pulls every generator from the source.
    pub fn complete(&mut self) {
        while self.pull_batch() {}
    }

    pub fn exhausted(&self) -> bool {
        self.pulled.len() >= self.source.len()
    }

    pub fn generator_count(&self) -> usize {
        self.source.len()
    }

    /// Dimension of the span of the generators pulled so far together with the shift family.
    pub fn dim(&self) -> usize {
        self.eliminated.iter().filter(|e| **e).count() + self.echelon.rank()
    }

    /// Canonical reduced row-echelon basis of the span, as vectors over the window basis.
    pub fn rref_rows(&self) -> Vec<Vec<Scalar>> {
        let mut e = Echelon::new(self.window.dim(), false);
        let mut id = 0;
        for (col, b) in self.window.basis.iter().enumerate() {
            if self.eliminated[col] {
                e.insert(id, &self.dense(&self.shift_generator(b)));
                id += 1;
            }
        }
        for g in &self.pulled {
            e.insert(id, &self.dense(g));
            id += 1;
        }
        e.rref()
    }

    pub fn dense(&self, v: &GradedVector) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.window.dim()];
        for (b, c) in v.terms() {
            out[self.window.column(b).expect("inside window")] = c.clone();
        }
        out
    }

    /// Canonical representative of x modulo the full span, after pulling every generator.
    /// Pivots are taken at the deepest columns first, so the remainder lives as low as possible.
    pub fn reduce(&mut self, x: &GradedVector) -> Option<GradedVector> {
        if !self.window.contains(x) {
            return None;
        }
        self.complete();
        let n = self.window.dim();
        let flip = |v: Vec<Scalar>| -> Vec<Scalar> { v.into_iter().rev().collect() };
        if self.low_first.is_none() {
            let mut e = Echelon::new(n, false);
            let mut id = 0;
            for (col, b) in self.window.basis.iter().enumerate() {
                if self.eliminated[col] {
                    e.insert(id, &flip(self.dense(&self.shift_generator(b))));
                    id += 1;
                }
            }
            for g in &self.pulled {
                e.insert(id, &flip(self.dense(g)));
                id += 1;
            }
            self.low_first = Some(e);
        }
        let rem = self.low_first.as_ref().expect("built above").reduce(&flip(self.dense(x)));
        let mut out = GradedVector::zero();
        for (i, c) in rem.into_iter().enumerate() {
            if !c.is_zero() {
                out.add_term(self.window.basis[n - 1 - i].clone(), c);
            }
        }
        Some(out)
    }

    /// One-sided membership; pulls more generators until decided.
    pub fn membership(&mut self, x: &GradedVector) -> MembershipCert {
        let depth = self.window.depth;
        if !self.window.contains(x) {
            return MembershipCert::inconclusive(depth);
        }
        let (nf, _) = self.normal_form(x);
        loop {
            if let Some(w) = self.echelon.solve(&nf) {
                return self.certify(x, &w);
            }
            if !self.pull_batch() {
                return MembershipCert::inconclusive(depth);
            }
        }
    }

    fn certify(&self, x: &GradedVector, combo: &BTreeMap<usize, Scalar>) -> MembershipCert {
        let mut explicit = GradedVector::zero();
        for (&id, c) in combo {
            explicit.add_scaled(&self.pulled[id], c);
        }
        let remainder = x.minus(&explicit);
        let (nf, shifts) = self.normal_form(&remainder);
        assert!(nf.iter().all(|c| c.is_zero()), "remainder must lie in the shift family span");
        let mut rebuilt = explicit;
        let mut witness = Vec::new();
        for (b, s) in &shifts {
            rebuilt.add_scaled(&self.shift_generator(b), s);
            witness.push((format!("(L(-1)+L(0))[{b}]"), crate::formal::scalar_to_string(s)));
        }
        for (&id, c) in combo {
            witness.push((self.source.label(id), crate::formal::scalar_to_string(c)));
        }
        assert_eq!(&rebuilt, x, "membership witness must reproduce the vector exactly");
        MembershipCert { status: Status::Certified, witness, window: self.window.depth }
    }
}
