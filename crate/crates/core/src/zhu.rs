//! The product *_N on V, the subspace O_N(V), windowed quotients V_{≤D}/(O_N(V) ∩ span),
//! the spaces Ω_N(W) and Ω⁰_N(W), and zero-mode actions o(u).

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use parking_lot::Mutex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::{binom_i, int, residue_pairing, shifted_binomial, sign, Scalar};
use crate::linalg::Echelon;
use crate::vector::{BasisVector, GradedVector};
use crate::voa::{Module, Voa};
use crate::window::{GeneratorSource, MembershipCert, Window, WindowSubspace};

/// Res_x x^p (1+x)^a Y_W(u,x) w for a basis vector u of V.
pub fn res_y(module: &Module, p: i64, a: &Scalar, u: &BasisVector, w: &GradedVector) -> Result<GradedVector> {
    let Some(dw) = w.max_depth() else {
        return Ok(GradedVector::zero());
    };
    let kmax = u.depth() as i64 - 1 + dw as i64;
    let series = shifted_binomial(p, a, kmax);
    let uv = GradedVector::basis(u.clone());
    let mut out = GradedVector::zero();
    for (c, v) in residue_pairing(&series, kmax, |k| module.mode(&uv, k, w))? {
        out.add_scaled(&v, &c);
    }
    Ok(out)
}

/// u *_N w = Σ_m (-1)^m C(m+N,N) Res_x x^{-N-m-1} Y_W((1+x)^{L(0)_s+N}u, x) w.
/// With W = V this is the algebra product.
pub fn star(module: &Module, n: u32, u: &GradedVector, w: &GradedVector) -> Result<GradedVector> {
    let ni = n as i64;
    let mut out = GradedVector::zero();
    for (a, x) in u.terms() {
        let e = int(a.depth() as i64 + ni);
        for m in 0..=ni {
            let c = sign(m) * binom_i(m + ni, ni) * x;
            out.add_scaled(&res_y(module, -ni - m - 1, &e, a, w)?, &c);
        }
    }
    Ok(out)
}

/// Res_x x^{-2N-1-n} Y((1+x)^{L(0)+N}u, x) v.
pub fn circ_n_v(module: &Module, big_n: u32, u: &GradedVector, v: &GradedVector, n: u32) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    for (a, x) in u.terms() {
        let e = int(a.depth() as i64 + big_n as i64);
        out.add_scaled(&res_y(module, -2 * big_n as i64 - 1 - n as i64, &e, a, v)?, x);
    }
    Ok(out)
}

/// (L(-1)+L(0))u.
pub fn weight_shift(module: &Module, u: &GradedVector) -> GradedVector {
    module.l_minus1(u).plus(&module.l0_semisimple(u))
}

/// o(u) = Y_{wt u - 1}(u), summed over homogeneous components of u.
pub fn o_action(w_mod: &Module, u: &GradedVector, w: &GradedVector) -> GradedVector {
    let mut out = GradedVector::zero();
    for (k, uk) in u.components() {
        out.add_assign(&w_mod.mode(&uk, k as i64 - 1, w));
    }
    out
}

/// Basis of Ω⁰_N(W) = ⊕_{n=0}^N W_[h+n].
pub fn omega0_n(w_mod: &Module, n: u32) -> Vec<BasisVector> {
    w_mod.basis_up_to(n)
}

/// Generators Res_x x^{-2N-1-n}(1+x)^{wt u+N}Y(u,x)v fitting in depth ≤ D, ordered by (wt u, wt v, n).
struct VGenerators {
    module: Arc<Module>,
    big_n: u32,
    specs: Vec<(BasisVector, BasisVector, u32)>,
}

impl VGenerators {
    fn new(module: Arc<Module>, big_n: u32, depth: u32) -> Self {
        let mut specs = Vec::new();
        let budget = depth as i64 - 2 * big_n as i64;
        for wu in 1..=budget.max(0) as u32 {
            for wv in 0..=(budget - wu as i64 - 1).max(-1) {
                let wv = wv as u32;
                for n in 1..=(budget - wu as i64 - wv as i64) as u32 {
                    for u in module.basis_at_depth(wu) {
                        for v in module.basis_at_depth(wv) {
                            specs.push((u.clone(), v, n));
                        }
                    }
                }
            }
        }
        // (wt u, wt v, n) lexicographic, then the monomials themselves
        specs.sort_by(|a, b| {
            (a.0.depth(), a.1.depth(), a.2, &a.0, &a.1).cmp(&(b.0.depth(), b.1.depth(), b.2, &b.0, &b.1))
        });
        VGenerators { module, big_n, specs }
    }
}

impl GeneratorSource for VGenerators {
    fn len(&self) -> usize {
        self.specs.len()
    }

    fn label(&self, i: usize) -> String {
        let (u, v, n) = &self.specs[i];
        format!("res[n={n}]({u},{v})")
    }

    fn expand(&self, i: usize) -> GradedVector {
        let (u, v, n) = &self.specs[i];
        circ_n_v(&self.module, self.big_n, &GradedVector::basis(u.clone()), &GradedVector::basis(v.clone()), *n)
            .expect("integer weights give finite binomials")
    }
}

/// O_N(V) inside the depth-D window of V.
pub struct ZhuContext {
    pub voa: Voa,
    pub n: u32,
    pub depth: u32,
    subspace: Mutex<WindowSubspace>,
}

impl ZhuContext {
    pub fn new(voa: &Voa, n: u32, depth: u32) -> Self {
        let window = Arc::new(Window::new(voa.module.clone(), depth));
        let source = VGenerators::new(voa.module.clone(), n, depth);
        let subspace = WindowSubspace::new(window, true, Box::new(source));
        ZhuContext { voa: voa.clone(), n, depth, subspace: Mutex::new(subspace) }
    }

    fn check(&self, v: GradedVector) -> Result<GradedVector> {
        match v.max_depth() {
            Some(d) if d > self.depth => Err(Error::WindowOverflow { depth: d, window: self.depth }),
            _ => Ok(v),
        }
    }

    pub fn star(&self, u: &GradedVector, v: &GradedVector) -> Result<GradedVector> {
        self.check(star(&self.voa.module, self.n, u, v)?)
    }

    pub fn circ(&self, u: &GradedVector, v: &GradedVector, n: u32) -> Result<GradedVector> {
        self.check(circ_n_v(&self.voa.module, self.n, u, v, n)?)
    }

    pub fn membership(&self, x: &GradedVector) -> MembershipCert {
        self.subspace.lock().membership(x)
    }

    /// Pulls every in-window generator and reports (window dim, span dim).
    pub fn enumerate(&self) -> (usize, usize) {
        let mut s = self.subspace.lock();
        s.complete();
        (s.window.dim(), s.dim())
    }

    /// Canonical representative of x modulo O_N(V) ∩ window.
    pub fn reduce(&self, x: &GradedVector) -> Result<GradedVector> {
        let x = self.check(x.clone())?;
        let mut sub = self.subspace.lock();
        if let Some((b, _)) = x.terms().find(|(b, _)| sub.window.column(b).is_none()) {
            return Err(Error::Invalid(format!("{b} is not a basis vector of {}", self.voa.id())));
        }
        Ok(sub.reduce(&x).expect("checked against the window"))
    }

    pub fn rref_rows(&self) -> Vec<Vec<Scalar>> {
        let mut s = self.subspace.lock();
        s.complete();
        s.rref_rows()
    }
}

/// Contexts shared across queries, keyed by (N, D).
pub struct ZhuCache {
    voa: Voa,
    contexts: Mutex<HashMap<(u32, u32), Arc<ZhuContext>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RetryOutcome {
    pub cert: MembershipCert,
    pub windows_tried: Vec<u32>,
}

impl ZhuCache {
    pub fn new(voa: &Voa) -> Self {
        ZhuCache { voa: voa.clone(), contexts: Mutex::new(HashMap::new()) }
    }

    pub fn voa(&self) -> &Voa {
        &self.voa
    }

    pub fn context(&self, n: u32, depth: u32) -> Arc<ZhuContext> {
        self.contexts.lock().entry((n, depth)).or_insert_with(|| Arc::new(ZhuContext::new(&self.voa, n, depth))).clone()
    }

    /// Tries window D, then D+2, D+4, ... for `retries` extra attempts, clamped to `cap`.
    pub fn membership_with_retry(&self, n: u32, x: &GradedVector, depth: u32, retries: u32, cap: u32) -> RetryOutcome {
        let mut tried = Vec::new();
        let start = depth.max(x.max_depth().unwrap_or(0));
        for r in 0..=retries {
            // past the cap, fall back to the cap itself once
            let d = (start + 2 * r).min(cap);
            if d < x.max_depth().unwrap_or(0) || tried.last() == Some(&d) {
                break;
            }
            tried.push(d);
            let cert = self.context(n, d).membership(x);
            if cert.certified() {
                return RetryOutcome { cert, windows_tried: tried };
            }
        }
        let last = tried.last().copied().unwrap_or(start);
        RetryOutcome { cert: MembershipCert::inconclusive(last), windows_tried: tried }
    }
}

/// Windowed quotient table: for each D' ≤ D, dim V_{≤D'} and dim V_{≤D'} - dim(span).
#[derive(Debug, Clone, Serialize)]
pub struct ZhuTable {
    pub algebra: String,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "D")]
    pub d: u32,
    pub window_dims: Vec<usize>,
    pub quotient_upper_bounds: Vec<usize>,
    pub certs: Vec<serde_json::Value>,
}

pub fn zhu_table(voa: &Voa, n: u32, depth: u32) -> ZhuTable {
    let mut window_dims = Vec::new();
    let mut bounds = Vec::new();
    for d in 0..=depth {
        let ctx = ZhuContext::new(voa, n, d);
        let (wd, sd) = ctx.enumerate();
        window_dims.push(wd);
        bounds.push(wd - sd);
    }
    ZhuTable { algebra: voa.id(), n, d: depth, window_dims, quotient_upper_bounds: bounds, certs: Vec::new() }
}

/// Kernel of all weight-lowering constraints (Y_W)_k(u)w = 0 with wt u - k - 1 < -N, for
/// basis u of weight ≤ gen_weight_max, inside depth ≤ depth_max. Returned per depth as a
/// list of basis vectors of the kernel.
pub fn omega_n(voa: &Voa, w_mod: &Module, n: u32, depth_max: u32, gen_weight_max: u32) -> Vec<GradedVector> {
    let gens = voa.basis_up_to(gen_weight_max);
    let mut out = Vec::new();
    for d in 0..=depth_max {
        let basis = w_mod.basis_at_depth(d);
        let mut e = Echelon::new(basis.len(), false);
        let mut id = 0;
        for u in &gens {
            let uv = GradedVector::basis(u.clone());
            // the mode lowers depth by s = k + 1 - wt u, with N < s ≤ d
            for s in (n + 1)..=d {
                let k = s as i64 + u.depth() as i64 - 1;
                let images: Vec<GradedVector> =
                    basis.iter().map(|b| w_mod.mode(&uv, k, &GradedVector::basis(b.clone()))).collect();
                let target = w_mod.basis_at_depth(d - s);
                for t in &target {
                    let row: Vec<Scalar> = images.iter().map(|im| im.coeff(t)).collect();
                    if row.iter().any(|c| !c.is_zero()) {
                        e.insert(id, &row);
                        id += 1;
                    }
                }
            }
        }
        for kv in e.kernel() {
            out.push(basis.iter().cloned().zip(kv).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::frac;
    use crate::vector::Generator;

    fn a(parts: &[u32]) -> GradedVector {
        GradedVector::basis(BasisVector::of(Generator::Alpha, parts))
    }

    #[test]
    fn star_examples() {
        let v = Voa::heisenberg();
        assert_eq!(star(&v.module, 0, &v.vacuum(), &a(&[2, 1])).unwrap(), a(&[2, 1]));
        assert_eq!(star(&v.module, 0, &a(&[1]), &a(&[1])).unwrap(), a(&[1, 1]));
        for n in 0..3 {
            assert_eq!(star(&v.module, n, &v.vacuum(), &v.vacuum()).unwrap(), v.vacuum());
        }
    }

    #[test]
    fn small_windows() {
        let v = Voa::heisenberg();
        let ctx = ZhuContext::new(&v, 0, 2);
        assert!(ctx.membership(&a(&[2]).plus(&a(&[1]))).certified());
        let ctx0 = ZhuContext::new(&v, 0, 0);
        assert_eq!(ctx0.enumerate(), (1, 0));
        assert!(!ctx.membership(&v.vacuum()).certified());
    }

    #[test]
    fn omega0_examples() {
        let f = Module::heisenberg_fock(frac(1, 2));
        assert_eq!(omega0_n(&f, 2).len(), 4);
        let vir = Module::virasoro_vacuum(frac(1, 2));
        assert_eq!(omega0_n(&vir, 2), vec![BasisVector::lowest(), BasisVector::of(Generator::L, &[2])]);
    }

    #[test]
    fn omega_n_on_fock_is_lowest_space() {
        let v = Voa::heisenberg();
        let f = Module::heisenberg_fock(int(1));
        let k = omega_n(&v, &f, 0, 3, 3);
        assert_eq!(k, vec![a(&[])]);
    }
}
