//! Left and right actions of V on a module W, the subspace O_N(W), and membership checks
//! for the congruences that make A_N(W) = W/O_N(W) an A_N(V)-bimodule.
//!
//! Two quotient conventions are available.
//!
//! [`Convention::WeightShift`] spans O_N(W) by L(-1)w + L(0)_s w together with
//! u ∘_N w = Res_x x^{-2N-2} Y_W((1+x)^{L(0)_s+N}u, x) w, and uses the right action
//! built from Y_{WV}^W. [`Convention::CircOnly`] keeps only the u ∘_N w family and
//! uses the right action *'_N written purely with Y_W.
//!
//! They differ in substance. In the first, ω *_N w ≡ w *_N ω, so the quotient forgets
//! the difference between left and right lowest weights, and the map ρ(𝒴) of an
//! intertwining operator does not vanish on L(-1)w + L(0)_s w once h₃ ≠ h₂ + n. The
//! second keeps that information and is the one ρ and the fusion computation use.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::{binom_i, int, residue_pairing, shifted_binomial, sign, Scalar};
use crate::vector::{BasisVector, GradedVector};
use crate::voa::{ywv_mode, Module, Voa};
use crate::window::{GeneratorSource, MembershipCert, Status, Window, WindowSubspace};
use crate::zhu::{self, res_y, star, weight_shift};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Convention {
    WeightShift,
    CircOnly,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::WeightShift => "weight_shift",
            Convention::CircOnly => "circ_only",
        }
    }
}

/// Res_x x^p (1+x)^a Y_{WV}^W(w,x) u for a basis vector w of W.
pub fn res_ywv(w_mod: &Module, p: i64, a: &Scalar, w: &BasisVector, u: &GradedVector) -> Result<GradedVector> {
    let Some(du) = u.max_depth() else {
        return Ok(GradedVector::zero());
    };
    let kmax = w.depth() as i64 + du as i64 - 1;
    let series = shifted_binomial(p, a, kmax);
    let wv = GradedVector::basis(w.clone());
    let mut out = GradedVector::zero();
    for (c, v) in residue_pairing(&series, kmax, |k| ywv_mode(w_mod, &wv, k, u))? {
        out.add_scaled(&v, &c);
    }
    Ok(out)
}

/// u *_N w with Y_W.
pub fn left_star(w_mod: &Module, n: u32, u: &GradedVector, w: &GradedVector) -> Result<GradedVector> {
    star(w_mod, n, u, w)
}

/// w *_N u = Σ_m (-1)^m C(m+N,N) Res_x x^{-N-m-1} Y_{WV}^W((1+x)^{L(0)_s+N}w, x) u.
pub fn right_star(w_mod: &Module, n: u32, w: &GradedVector, u: &GradedVector) -> Result<GradedVector> {
    let ni = n as i64;
    let mut out = GradedVector::zero();
    for (b, x) in w.terms() {
        let e = w_mod.weight(b) + int(ni);
        for m in 0..=ni {
            let c = sign(m) * binom_i(m + ni, ni) * x;
            out.add_scaled(&res_ywv(w_mod, -ni - m - 1, &e, b, u)?, &c);
        }
    }
    Ok(out)
}

/// w *'_N u = Σ_m C(m+N,N) (-1)^N Res_x x^{-N-m-1} Y_W((1+x)^{L(0)_s+m-1}u, x) w.
pub fn right_star_alt(w_mod: &Module, n: u32, w: &GradedVector, u: &GradedVector) -> Result<GradedVector> {
    let ni = n as i64;
    let mut out = GradedVector::zero();
    for (a, x) in u.terms() {
        for m in 0..=ni {
            let e = int(a.depth() as i64 + m - 1);
            let c = binom_i(m + ni, ni) * sign(ni) * x;
            out.add_scaled(&res_y(w_mod, -ni - m - 1, &e, a, w)?, &c);
        }
    }
    Ok(out)
}

/// Res_x x^{-2N-2-p} Y_W((1+x)^{L(0)_s+N+q}u, x) w; p = q = 0 is u ∘_N w.
pub fn circ_w_deep(w_mod: &Module, n: u32, u: &GradedVector, w: &GradedVector, p: u32, q: u32) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    for (a, x) in u.terms() {
        let e = int(a.depth() as i64 + n as i64 + q as i64);
        out.add_scaled(&res_y(w_mod, -2 * n as i64 - 2 - p as i64, &e, a, w)?, x);
    }
    Ok(out)
}

pub fn circ_w(w_mod: &Module, n: u32, u: &GradedVector, w: &GradedVector) -> Result<GradedVector> {
    circ_w_deep(w_mod, n, u, w, 0, 0)
}

/// Res_x x^{-2N-2-p} Y_{WV}^W((1+x)^{L(0)_s+N+q}w, x) u; p = q = 0 is w ∘_N u.
pub fn circ_wv_deep(w_mod: &Module, n: u32, w: &GradedVector, u: &GradedVector, p: u32, q: u32) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    for (b, x) in w.terms() {
        let e = w_mod.weight(b) + int(n as i64 + q as i64);
        out.add_scaled(&res_ywv(w_mod, -2 * n as i64 - 2 - p as i64, &e, b, u)?, x);
    }
    Ok(out)
}

pub fn circ_wv(w_mod: &Module, n: u32, w: &GradedVector, u: &GradedVector) -> Result<GradedVector> {
    circ_wv_deep(w_mod, n, w, u, 0, 0)
}

/// The right action belonging to a convention.
pub fn right_action(conv: Convention, w_mod: &Module, n: u32, w: &GradedVector, u: &GradedVector) -> Result<GradedVector> {
    match conv {
        Convention::WeightShift => right_star(w_mod, n, w, u),
        Convention::CircOnly => right_star_alt(w_mod, n, w, u),
    }
}

struct WGenerators {
    module: Arc<Module>,
    n: u32,
    /// (u, w, p, q); p = q = 0 is the defining family, the rest are the redundant deep powers.
    specs: Vec<(BasisVector, BasisVector, u32, u32)>,
}

impl WGenerators {
    fn new(voa: &Voa, module: Arc<Module>, n: u32, depth: u32, deep_power: bool) -> Self {
        let mut specs = Vec::new();
        let budget = depth as i64 - 2 * n as i64 - 1;
        for wu in 1..=budget.max(0) as u32 {
            for dw in 0..=(budget - wu as i64) as u32 {
                let pmax = if deep_power { budget - wu as i64 - dw as i64 } else { 0 };
                for p in 0..=pmax as u32 {
                    for q in 0..=p {
                        for u in voa.module.basis_at_depth(wu) {
                            for w in module.basis_at_depth(dw) {
                                specs.push((u.clone(), w, p, q));
                            }
                        }
                    }
                }
            }
        }
        specs.sort_by(|a, b| (a.0.depth(), a.1.depth(), a.2, a.3, &a.0, &a.1).cmp(&(b.0.depth(), b.1.depth(), b.2, b.3, &b.0, &b.1)));
        WGenerators { module, n, specs }
    }
}

impl GeneratorSource for WGenerators {
    fn len(&self) -> usize {
        self.specs.len()
    }

    fn label(&self, i: usize) -> String {
        let (u, w, p, q) = &self.specs[i];
        if *p == 0 {
            format!("circ({u},{w})")
        } else {
            format!("circ[p={p},q={q}]({u},{w})")
        }
    }

    fn expand(&self, i: usize) -> GradedVector {
        let (u, w, p, q) = &self.specs[i];
        circ_w_deep(&self.module, self.n, &GradedVector::basis(u.clone()), &GradedVector::basis(w.clone()), *p, *q)
            .expect("integer weights of V give finite binomials")
    }
}

pub struct BimoduleContext {
    pub voa: Voa,
    pub module: Arc<Module>,
    pub n: u32,
    pub depth: u32,
    pub convention: Convention,
    subspace: Mutex<WindowSubspace>,
}

impl BimoduleContext {
    pub fn new(voa: &Voa, module: Arc<Module>, n: u32, depth: u32, convention: Convention, deep_power: bool) -> Result<Self> {
        if !voa.acts_on(&module) {
            return Err(Error::Invalid(format!("{} is not a module for {}", module.id(), voa.id())));
        }
        let window = Arc::new(Window::new(module.clone(), depth));
        let source = WGenerators::new(voa, module.clone(), n, depth, deep_power);
        let shift = convention == Convention::WeightShift;
        let subspace = Mutex::new(WindowSubspace::new(window, shift, Box::new(source)));
        Ok(BimoduleContext { voa: voa.clone(), module, n, depth, convention, subspace })
    }

    pub fn membership(&self, x: &GradedVector) -> MembershipCert {
        self.subspace.lock().membership(x)
    }

    pub fn enumerate(&self) -> (usize, usize) {
        let mut s = self.subspace.lock();
        s.complete();
        (s.window.dim(), s.dim())
    }
}

pub struct BimoduleCache {
    pub voa: Voa,
    pub module: Arc<Module>,
    pub convention: Convention,
    contexts: Mutex<HashMap<(u32, u32), Arc<BimoduleContext>>>,
}

impl BimoduleCache {
    pub fn new(voa: &Voa, module: Arc<Module>, convention: Convention) -> Result<Self> {
        if !voa.acts_on(&module) {
            return Err(Error::Invalid(format!("{} is not a module for {}", module.id(), voa.id())));
        }
        Ok(BimoduleCache { voa: voa.clone(), module, convention, contexts: Mutex::new(HashMap::new()) })
    }

    pub fn context(&self, n: u32, depth: u32) -> Arc<BimoduleContext> {
        let mut map = self.contexts.lock();
        map.entry((n, depth))
            .or_insert_with(|| {
                Arc::new(
                    BimoduleContext::new(&self.voa, self.module.clone(), n, depth, self.convention, false)
                        .expect("checked at construction"),
                )
            })
            .clone()
    }

    pub fn membership_with_retry(&self, n: u32, x: &GradedVector, depth: u32, retries: u32, cap: u32) -> zhu::RetryOutcome {
        let start = depth.max(x.max_depth().unwrap_or(0));
        let mut tried = Vec::new();
        for r in 0..=retries {
            // past the cap, fall back to the cap itself once
            let d = (start + 2 * r).min(cap);
            if d < x.max_depth().unwrap_or(0) || tried.last() == Some(&d) {
                break;
            }
            tried.push(d);
            let cert = self.context(n, d).membership(x);
            if cert.certified() {
                return zhu::RetryOutcome { cert, windows_tried: tried };
            }
        }
        let last = tried.last().copied().unwrap_or(start);
        zhu::RetryOutcome { cert: MembershipCert::inconclusive(last), windows_tried: tried }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom_id: String,
    pub inputs: Vec<String>,
    pub status: Status,
    #[serde(rename = "window_D")]
    pub window_d: u32,
    pub witness_size: usize,
    pub windows_tried: Vec<u32>,
}

/// Retry policy for bimodule certifications.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    /// Extra window beyond depth-sum + 2N.
    pub slack: u32,
    pub retries: u32,
    pub cap: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { slack: 4, retries: 2, cap: 24 }
    }
}

pub struct Checker<'a> {
    pub cache: &'a BimoduleCache,
    pub n: u32,
    pub policy: RetryPolicy,
}

impl Checker<'_> {
    fn m(&self) -> &Module {
        &self.cache.module
    }

    fn v(&self) -> &Module {
        &self.cache.voa.module
    }

    fn right(&self, w: &GradedVector, u: &GradedVector) -> Result<GradedVector> {
        right_action(self.cache.convention, self.m(), self.n, w, u)
    }

    fn certify(&self, id: &str, inputs: &[&BasisVector], x: &GradedVector) -> AxiomReport {
        let depth_sum: u32 = inputs.iter().map(|b| b.depth()).sum();
        let d0 = depth_sum + 2 * self.n + self.policy.slack;
        let out = self.cache.membership_with_retry(self.n, x, d0, self.policy.retries, self.policy.cap);
        AxiomReport {
            axiom_id: id.to_string(),
            inputs: inputs.iter().map(|b| b.to_string()).collect(),
            status: out.cert.status,
            window_d: out.cert.window,
            witness_size: out.cert.witness.len(),
            windows_tried: out.windows_tried,
        }
    }

    /// The congruences of the three-part lemma relating left/right actions, for (u, w) and deep
    /// power (p, q) with p ≥ q.
    pub fn lemma_parts(&self, part: u8, u: &BasisVector, w: &BasisVector, p: u32, q: u32) -> Result<Vec<AxiomReport>> {
        let (m, n) = (self.m(), self.n);
        let ni = n as i64;
        let uv = GradedVector::basis(u.clone());
        let wv = GradedVector::basis(w.clone());
        let wt_w = m.weight(w);
        let mut out = Vec::new();
        match part {
            1 => {
                let mut alt = GradedVector::zero();
                for mm in 0..=ni {
                    let c = binom_i(mm + ni, ni) * sign(ni);
                    alt.add_scaled(&res_ywv(m, -ni - mm - 1, &(&wt_w + int(mm - 1)), w, &uv)?, &c);
                }
                let x = left_star(m, n, &uv, &wv)?.minus(&alt);
                out.push(self.certify("left_via_ywv", &[u, w], &x));
                let x = right_star(m, n, &wv, &uv)?.minus(&right_star_alt(m, n, &wv, &uv)?);
                out.push(self.certify("right_vs_alt", &[u, w], &x));
            }
            2 => {
                if q > p {
                    return Err(Error::Invalid("deep power needs p >= q".into()));
                }
                let pad = [u, w];
                let x = circ_w_deep(m, n, &uv, &wv, p, q)?;
                let mut r = self.certify("deep_circ_w", &pad, &x);
                r.inputs.push(format!("p={p},q={q}"));
                out.push(r);
                let x = circ_wv_deep(m, n, &wv, &uv, p, q)?;
                let mut r = self.certify("deep_circ_wv", &pad, &x);
                r.inputs.push(format!("p={p},q={q}"));
                out.push(r);
            }
            3 => {
                let l = left_star(m, n, &uv, &wv)?;
                let r = right_star(m, n, &wv, &uv)?;
                let e = int(u.depth() as i64 - 1);
                let x = l.minus(&r).minus(&res_y(m, 0, &e, u, &wv)?);
                out.push(self.certify("commutator_y", &[u, w], &x));
                let x = r.minus(&l).minus(&res_ywv(m, 0, &(&wt_w - int(1)), w, &uv)?);
                out.push(self.certify("commutator_ywv", &[u, w], &x));
            }
            _ => return Err(Error::Invalid(format!("no lemma part {part}"))),
        }
        Ok(out)
    }

    /// Invariance of O_N(W), compatibility with O_N(V), associativity and commuting actions
    /// for the sample (u, v, w).
    pub fn axioms(&self, u: &BasisVector, v: &BasisVector, w: &BasisVector) -> Result<Vec<AxiomReport>> {
        let (m, n) = (self.m(), self.n);
        let uv = GradedVector::basis(u.clone());
        let vv = GradedVector::basis(v.clone());
        let wv = GradedVector::basis(w.clone());
        let ins = [u, v, w];
        let mut out = Vec::new();
        let left = |a: &GradedVector, b: &GradedVector| left_star(m, n, a, b);

        if self.cache.convention == Convention::WeightShift {
            let sw = weight_shift(m, &wv);
            out.push(self.certify("shift_w_times_u", &ins, &self.right(&sw, &uv)?));
            out.push(self.certify("u_times_shift_w", &ins, &left(&uv, &sw)?));
        }
        let cw = circ_w(m, n, &uv, &wv)?;
        out.push(self.certify("circ_w_times_v", &ins, &self.right(&cw, &vv)?));
        out.push(self.certify("v_times_circ_w", &ins, &left(&vv, &cw)?));

        let su = weight_shift(self.v(), &uv);
        out.push(self.certify("shift_u_times_w", &ins, &left(&su, &wv)?));
        out.push(self.certify("w_times_shift_u", &ins, &self.right(&wv, &su)?));
        let cuv = zhu::circ_n_v(self.v(), n, &uv, &vv, 1)?;
        out.push(self.certify("circ_uv_times_w", &ins, &left(&cuv, &wv)?));
        let cvu = zhu::circ_n_v(self.v(), n, &vv, &uv, 1)?;
        out.push(self.certify("w_times_circ_vu", &ins, &self.right(&wv, &cvu)?));

        let x = left(&uv, &left(&vv, &wv)?)?.minus(&left(&star(self.v(), n, &uv, &vv)?, &wv)?);
        out.push(self.certify("left_associative", &ins, &x));
        let x = self.right(&wv, &star(self.v(), n, &vv, &uv)?)?.minus(&self.right(&self.right(&wv, &vv)?, &uv)?);
        out.push(self.certify("right_associative", &ins, &x));
        let x = self.right(&left(&uv, &wv)?, &vv)?.minus(&left(&uv, &self.right(&wv, &vv)?)?);
        out.push(self.certify("actions_commute", &ins, &x));
        Ok(out)
    }
}
