//! Recurrence relations among the P coefficients: residual checks and a
//! forward propagation engine over the (n, n3) lattice.
//!
//! A relation is a list of terms `c_i P(idx + shift_i)`. Terms whose integer
//! coefficient vanishes are dropped before their index is validated, so that
//! e.g. `(n3 − l3) P_{n3−1}` at n3 = l3 does not raise.

use std::collections::{HashMap, HashSet};

use rug::Float;

use crate::error::{Error, Result};
use crate::exactmath::{PrecisionContext, Real};
use crate::pcoeff::{p_series, Backend, PIndex, PValue};

struct Term {
    int: i64,
    mult: Real,
    shift: [i64; 5],
}

fn term(int: i64, mult: Real, shift: [i64; 5]) -> Term {
    Term { int, mult, shift }
}

fn shifted(idx: PIndex, s: [i64; 5]) -> Result<PIndex> {
    PIndex::from_signed(
        idx.n as i64 + s[0],
        idx.l as i64 + s[1],
        idx.n3 as i64 + s[2],
        idx.l3 as i64 + s[3],
        idx.l2 as i64 + s[4],
    )
}

fn residual(idx: PIndex, terms: Vec<Term>, eval: &mut dyn FnMut(PIndex) -> Result<Real>, ctx: &PrecisionContext) -> Result<Real> {
    idx.validate()?;
    let live: Vec<Term> = terms.into_iter().filter(|t| t.int != 0).collect();
    let mut pts = Vec::with_capacity(live.len());
    for t in &live {
        pts.push(shifted(idx, t.shift)?);
    }
    let mut sum = ctx.zero();
    let mut scale = ctx.zero();
    for (t, p) in live.iter().zip(pts) {
        let v = eval(p)?;
        let a = Float::with_val(ctx.bits, v.abs_ref());
        if a > scale {
            scale = a;
        }
        sum += v * &t.mult * t.int;
    }
    let r = sum.abs();
    Ok(if scale.is_zero() { r } else { r / scale })
}

fn series_eval<'a>(u: &'a Real, w: &'a Real, ctx: &'a PrecisionContext) -> impl FnMut(PIndex) -> Result<Real> + 'a {
    move |i| p_series(i, u, w, ctx).map(|p| p.value)
}

fn rec1_first_terms(idx: PIndex, ctx: &PrecisionContext) -> Vec<Term> {
    let (n3, l3) = (idx.n3 as i64, idx.l3 as i64);
    let one = ctx.one();
    vec![
        term(n3 + l3 + 1, one.clone(), [0, 0, 0, 0, 0]),
        term(-(n3 - l3), one.clone(), [0, 0, -1, 0, 0]),
        term(-1, one.clone(), [0, 0, 0, -1, 0]),
        term(1, one, [0, 0, -1, -1, 0]),
    ]
}

fn rec1_second_terms(idx: PIndex, ctx: &PrecisionContext) -> Vec<Term> {
    let (n, l) = (idx.n as i64, idx.l as i64);
    let one = ctx.one();
    vec![
        term(n + l + 1, one.clone(), [0, 0, 0, 0, 0]),
        term(-(n - l), one.clone(), [-1, 0, 0, 0, 0]),
        term(-1, one.clone(), [0, -1, 0, 0, 0]),
        term(1, one, [-1, -1, 0, 0, 0]),
    ]
}

fn l2_step_terms(idx: PIndex, u: &Real, ctx: &PrecisionContext) -> Vec<Term> {
    let (n, l, n3, l3, l2) = (idx.n as i64, idx.l as i64, idx.n3 as i64, idx.l3 as i64, idx.l2 as i64);
    let one = ctx.one();
    let one_m_u = Float::with_val(ctx.bits, 1u32 - u);
    let one_p_u = Float::with_val(ctx.bits, u + 1u32);
    let mid = Float::with_val(ctx.bits, u * (n3 + l2 + 2)) - (n + 1);
    let k = l2 + 1;
    vec![
        term(n + l + 2, one.clone(), [1, 0, 0, 0, 0]),
        term(n - l, one.clone(), [-1, 0, 0, 0, 0]),
        term(-2 * (n + 1), one, [0, 0, 0, 0, 0]),
        term(-k * (n + l + 2), one_m_u, [1, 0, 0, 0, 1]),
        term(-k * (n - l), one_p_u, [-1, 0, 0, 0, 1]),
        term(-2 * k, mid, [0, 0, 0, 0, 1]),
        term(2 * k * (n3 + l3 + 2), ctx.real(u), [0, 0, 1, 0, 1]),
    ]
}

fn fixed_angular_terms(idx: PIndex, u: &Real, ctx: &PrecisionContext) -> Vec<Term> {
    let (n, l, n3, l3) = (idx.n as i64, idx.l as i64, idx.n3 as i64, idx.l3 as i64);
    let one = ctx.one();
    let centre = (ctx.int(n + 1) - Float::with_val(ctx.bits, u * (n3 + 1))) * 2u32;
    vec![
        term(n3 + l3 + 2, ctx.real(u), [0, 0, 1, 0, 0]),
        term(n3 - l3, ctx.real(u), [0, 0, -1, 0, 0]),
        term(-(n + l + 2), one.clone(), [1, 0, 0, 0, 0]),
        term(-(n - l), one.clone(), [-1, 0, 0, 0, 0]),
        term(1, centre, [0, 0, 0, 0, 0]),
    ]
}

/// (n3+l3+1) P_{n3,l3} − (n3−l3) P_{n3−1,l3} − P_{n3,l3−1} + P_{n3−1,l3−1}, scaled.
pub fn residual_rec1_first(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Real> {
    residual_rec1_first_with(idx, &mut series_eval(u, w, ctx), ctx)
}

pub fn residual_rec1_first_with(idx: PIndex, eval: &mut dyn FnMut(PIndex) -> Result<Real>, ctx: &PrecisionContext) -> Result<Real> {
    residual(idx, rec1_first_terms(idx, ctx), eval, ctx)
}

/// (n+l+1) P_{n,l} − (n−l) P_{n−1,l} − P_{n,l−1} + P_{n−1,l−1}, scaled.
pub fn residual_rec1_second(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Real> {
    residual_rec1_second_with(idx, &mut series_eval(u, w, ctx), ctx)
}

pub fn residual_rec1_second_with(idx: PIndex, eval: &mut dyn FnMut(PIndex) -> Result<Real>, ctx: &PrecisionContext) -> Result<Real> {
    residual(idx, rec1_second_terms(idx, ctx), eval, ctx)
}

/// Relation linking multipole orders l2 and l2 + 1 at fixed (l, l3).
pub fn residual_l2_step(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Real> {
    residual_l2_step_with(idx, u, &mut series_eval(u, w, ctx), ctx)
}

pub fn residual_l2_step_with(idx: PIndex, u: &Real, eval: &mut dyn FnMut(PIndex) -> Result<Real>, ctx: &PrecisionContext) -> Result<Real> {
    residual(idx, l2_step_terms(idx, u, ctx), eval, ctx)
}

/// Five-point relation in (n, n3) at fixed (l, l3, l2).
pub fn residual_fixed_angular(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Real> {
    residual_fixed_angular_with(idx, u, &mut series_eval(u, w, ctx), ctx)
}

pub fn residual_fixed_angular_with(idx: PIndex, u: &Real, eval: &mut dyn FnMut(PIndex) -> Result<Real>, ctx: &PrecisionContext) -> Result<Real> {
    residual(idx, fixed_angular_terms(idx, u, ctx), eval, ctx)
}

/// Result of [`propagate_lattice`].
#[derive(Clone, Debug, PartialEq)]
pub struct Propagated {
    pub value: PValue,
    /// Number of recurrence solves performed before the target was reached.
    pub path_length: usize,
    /// Largest |generated value| / largest |seed value|.
    pub amplification: f64,
    /// Set when the amplification exceeds 1e6: forward recursion is losing
    /// digits and the value should be cross-checked.
    pub unstable: bool,
}

/// Fill the (n, n3) lattice at fixed (l, l3, l2) from the seeds by repeatedly
/// solving the five-point relation for its single unknown, until the target is
/// reached.
pub fn propagate_lattice(seeds: &[PValue], target: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Propagated> {
    target.validate()?;
    if u.is_zero() {
        return Err(Error::DegenerateU);
    }
    let (l, l3, l2) = (target.l, target.l3, target.l2);
    let mut known: HashMap<(u32, u32), Real> = HashMap::new();
    let mut seed_max = ctx.zero();
    for s in seeds {
        let i = s.index;
        if i.l != l || i.l3 != l3 || i.l2 != l2 {
            return Err(Error::InvalidArgument(format!("seed {i} does not share (l, l3, l2) with target {target}")));
        }
        if s.u != *u || s.w != *w {
            return Err(Error::InvalidArgument(format!("seed {i} was evaluated at different (u, w)")));
        }
        let a = Float::with_val(ctx.bits, s.value.abs_ref());
        if a > seed_max {
            seed_max = a;
        }
        known.insert((i.n, i.n3), ctx.real(&s.value));
    }
    let done = |v: Real, path: usize, amp: f64| Propagated {
        value: PValue { index: target, u: ctx.real(u), w: ctx.real(w), value: v, backend: Backend::Recurrence },
        path_length: path,
        amplification: amp,
        unstable: amp > 1e6,
    };
    if let Some(v) = known.get(&(target.n, target.n3)) {
        return Ok(done(v.clone(), 0, 1.0));
    }
    let span = (target.n - l) + (target.n3 - l3) + 2;
    let (nmax, n3max) = (l + span, l3 + span);
    let mut path = 0usize;
    let mut amp: f64 = 1.0;
    let mut stuck: HashSet<(u32, u32)> = HashSet::new();
    loop {
        let mut progress = false;
        for a in l..nmax {
            for b in l3..n3max {
                if stuck.contains(&(a, b)) {
                    continue;
                }
                let centre = PIndex { n: a, l, n3: b, l3, l2 };
                let terms: Vec<Term> = fixed_angular_terms(centre, u, ctx)
                    .into_iter()
                    .filter(|t| t.int != 0 && !t.mult.is_zero())
                    .collect();
                let pos: Vec<(u32, u32)> = terms
                    .iter()
                    .map(|t| ((a as i64 + t.shift[0]) as u32, (b as i64 + t.shift[2]) as u32))
                    .collect();
                let unknown: Vec<usize> = (0..pos.len()).filter(|&k| !known.contains_key(&pos[k])).collect();
                if unknown.is_empty() {
                    stuck.insert((a, b));
                    continue;
                }
                if unknown.len() > 1 {
                    continue;
                }
                let k = unknown[0];
                let mut acc = ctx.zero();
                for (j, t) in terms.iter().enumerate() {
                    if j != k {
                        acc += Float::with_val(ctx.bits, &known[&pos[j]] * &t.mult) * t.int;
                    }
                }
                let coef = Float::with_val(ctx.bits, &terms[k].mult * terms[k].int);
                let v = -acc / coef;
                if !seed_max.is_zero() {
                    let r = (Float::with_val(ctx.bits, v.abs_ref()) / &seed_max).to_f64();
                    amp = amp.max(r);
                }
                path += 1;
                if pos[k] == (target.n, target.n3) {
                    return Ok(done(v, path, amp));
                }
                known.insert(pos[k], v);
                stuck.insert((a, b));
                progress = true;
            }
        }
        if !progress {
            return Err(Error::InsufficientSeeds(target.to_string()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn idx(n: u32, l: u32, n3: u32, l3: u32, l2: u32) -> PIndex {
        PIndex { n, l, n3, l3, l2 }
    }

    fn ok(r: Result<Real>, c: &PrecisionContext) {
        let r = r.unwrap();
        assert!(r <= c.tol_half(), "residual {}", r.to_f64());
    }

    #[test]
    fn rec1_examples() {
        let c = ctx();
        ok(residual_rec1_first(idx(2, 0, 2, 1, 1), &c.f64(0.9), &c.f64(1.2), &c), &c);
        ok(residual_rec1_first(idx(3, 1, 2, 1, 0), &c.f64(1.5), &c.f64(2.0), &c), &c);
        assert!(matches!(residual_rec1_first(idx(1, 2, 0, 0, 0), &c.one(), &c.one(), &c), Err(Error::IndexViolation(_))));
        ok(residual_rec1_second(idx(2, 1, 2, 0, 1), &c.f64(0.8), &c.f64(1.3), &c), &c);
        ok(residual_rec1_second(idx(4, 2, 3, 1, 1), &c.f64(1.1), &c.f64(1.7), &c), &c);
        assert!(matches!(residual_rec1_second(idx(0, 0, 0, 0, 3), &c.one(), &c.one(), &c), Err(Error::IndexViolation(_))));
    }

    #[test]
    fn l2_step_examples() {
        let c = ctx();
        ok(residual_l2_step(idx(2, 1, 2, 1, 0), &c.f64(0.7), &c.f64(1.1), &c), &c);
        ok(residual_l2_step(idx(3, 1, 3, 0, 1), &c.f64(1.2), &c.f64(1.6), &c), &c);
        // l2 + 1 = 2 breaks l − l2 + l3 + 1 >= 0
        assert!(matches!(residual_l2_step(idx(3, 0, 3, 0, 1), &c.f64(1.2), &c.f64(1.6), &c), Err(Error::IndexViolation(_))));
    }

    #[test]
    fn fixed_angular_examples() {
        let c = ctx();
        ok(residual_fixed_angular(idx(2, 1, 2, 1, 1), &c.f64(0.9), &c.f64(1.2), &c), &c);
        ok(residual_fixed_angular(idx(5, 2, 4, 2, 0), &c.f64(1.3), &c.f64(1.8), &c), &c);
        assert!(matches!(residual_fixed_angular(idx(2, 3, 2, 0, 0), &c.one(), &c.one(), &c), Err(Error::IndexViolation(_))));
    }

    fn seeds(points: &[(u32, u32)], l: u32, l3: u32, l2: u32, u: &Real, w: &Real, c: &PrecisionContext) -> Vec<PValue> {
        points.iter().map(|&(n, n3)| p_series(idx(n, l, n3, l3, l2), u, w, c).unwrap()).collect()
    }

    #[test]
    fn propagation() {
        let c = ctx();
        let (u, w) = (c.f64(0.8), c.f64(1.1));
        let block: Vec<(u32, u32)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        let s = seeds(&block, 0, 0, 0, &u, &w, &c);
        let same = propagate_lattice(&s, idx(1, 0, 2, 0, 0), &u, &w, &c).unwrap();
        assert_eq!(same.path_length, 0);
        assert_eq!(same.value.value, s[5].value);
        // the five-point stencil cannot close the (3,3) corner from the block
        assert!(matches!(propagate_lattice(&s, idx(3, 0, 3, 0, 0), &u, &w, &c), Err(Error::InsufficientSeeds(_))));
        // the n = l row suffices
        let row: Vec<(u32, u32)> = (0..=6).map(|b| (0, b)).collect();
        let s = seeds(&row, 0, 0, 0, &u, &w, &c);
        let r = propagate_lattice(&s, idx(3, 0, 3, 0, 0), &u, &w, &c).unwrap();
        let want = p_series(idx(3, 0, 3, 0, 0), &u, &w, &c).unwrap().value;
        assert!(crate::pcoeff::rel_diff(&r.value.value, &want) <= c.tol_quarter());
        assert!(r.path_length > 0);
        assert_eq!(r.value.backend, Backend::Recurrence);
    }
}
