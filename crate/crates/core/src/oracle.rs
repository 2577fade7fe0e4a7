//! Brute-force oracles: radial quadrature, product quadrature on S³, the
//! pointwise multipole expansion and a finite-difference Laplacian.
//!
//! Nothing here calls the P backends except [`expansion_check`], whose right
//! side is the expansion itself.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::exactmath::{clebsch3d, kummer_coefficients, racah_harmonic, spherical_bessel_seq, Complex, PrecisionContext, Real};
use crate::fockgeom::{hsh_evaluate, hsh_solid, kinematics_of, norm2, project_x, project_y, Channel, UnitVec4, Vec3};
use crate::formfactor::{coeff_b, TransitionSpec};
use crate::pcoeff::PIndex;

const GL_POINTS: usize = 20;
const REL_TOL: f64 = 1e-12;
const ENVELOPE: f64 = 1e-22;
const MAX_DOUBLINGS: u32 = 6;

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(npts: usize, ctx: &PrecisionContext) -> (Vec<Real>, Vec<Real>) {
    let b = ctx.bits + 32;
    let pi = Float::with_val(b, rug::float::Constant::Pi);
    let mut xs = Vec::with_capacity(npts);
    let mut ws = Vec::with_capacity(npts);
    for i in 1..=npts {
        let mut x = Float::with_val(b, &pi * (4 * i as u32 - 1)) / (4 * npts as u32 + 2);
        x = x.cos();
        let mut dp = Float::new(b);
        for _ in 0..100 {
            // P_n and P_n' by the three-term recurrence
            let mut p0 = Float::with_val(b, 1u32);
            let mut p1 = Float::with_val(b, &x);
            for k in 2..=npts as u32 {
                let t = (Float::with_val(b, &x * &p1) * (2 * k - 1) - Float::with_val(b, &p0 * (k - 1))) / k;
                p0 = p1;
                p1 = t;
            }
            let one_m = Float::with_val(b, 1u32 - Float::with_val(b, x.square_ref()));
            dp = (Float::with_val(b, &p0 - Float::with_val(b, &x * &p1)) * npts as u32) / &one_m;
            let dx = Float::with_val(b, &p1 / &dp);
            x -= &dx;
            if dx.is_zero() || dx.abs().get_exp().unwrap_or(i32::MIN) < -(b as i32) {
                break;
            }
        }
        let one_m = Float::with_val(b, 1u32 - Float::with_val(b, x.square_ref()));
        let w = Float::with_val(b, 2u32) / (one_m * Float::with_val(b, dp.square_ref()));
        xs.push(Float::with_val(ctx.bits, &x));
        ws.push(Float::with_val(ctx.bits, &w));
    }
    (xs, ws)
}

/// One radial integrand ∫ r^{l+l'+2} e^{−(α+β)r} j_{l2}(kr) Φ(l−n, 2l+2, 2αr) Φ(l'−n', 2l'+2, 2βr) dr.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RadialTerm {
    pub n: u32,
    pub l: u32,
    pub nf: u32,
    pub lf: u32,
    pub l2: u32,
}

/// A radial integral together with ∫|integrand|, the scale against which
/// cancellation (and an exact zero) has to be judged.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialEstimate {
    pub value: Real,
    pub magnitude: Real,
}

impl RadialEstimate {
    /// |value − other| / max(|other|, REL_TOL·magnitude). Below the floor a
    /// value is indistinguishable from zero at the quadrature's target accuracy.
    pub fn rel_error(&self, other: &Real) -> f64 {
        let d = Float::with_val(self.value.prec(), &self.value - other).abs().to_f64();
        let floor = REL_TOL * self.magnitude.to_f64();
        d / other.to_f64().abs().max(floor)
    }
}

struct Poly {
    coeffs: Vec<Real>,
    abs_f64: Vec<f64>,
}

impl Poly {
    /// Φ(l−n, 2l+2, s·r) as a polynomial in r.
    fn kummer(n: u32, l: u32, s: &Real, ctx: &PrecisionContext) -> Poly {
        let mut coeffs = Vec::new();
        let mut sp = ctx.one();
        for c in kummer_coefficients(n - l, 2 * l + 2) {
            coeffs.push(ctx.rational(&c) * &sp);
            sp *= s;
        }
        let abs_f64 = coeffs.iter().map(|c| c.to_f64().abs()).collect();
        Poly { coeffs, abs_f64 }
    }

    fn eval(&self, r: &Real, bits: u32) -> Real {
        let mut acc = Float::new(bits);
        for c in self.coeffs.iter().rev() {
            acc *= r;
            acc += c;
        }
        acc
    }

    fn bound(&self, r: f64) -> f64 {
        self.abs_f64.iter().rev().fold(0.0, |a, c| a * r + c)
    }
}

fn panel_sums(
    ch: &Channel,
    terms: &[RadialTerm],
    polys: &[(Poly, Poly)],
    kmag: &Real,
    r_max: &Real,
    panels: usize,
    gl: &(Vec<Real>, Vec<Real>),
    ctx: &PrecisionContext,
) -> Vec<RadialEstimate> {
    let b = ctx.bits;
    let lmax = terms.iter().map(|t| t.l2).max().unwrap_or(0);
    let width = Float::with_val(b, r_max / panels as u32);
    let decay = Float::with_val(b, &ch.alpha + &ch.beta);
    let per_panel: Vec<Vec<(Real, Real)>> = (0..panels)
        .into_par_iter()
        .map(|p| {
            let mut acc = vec![(Float::new(b), Float::new(b)); terms.len()];
            let half = Float::with_val(b, &width / 2u32);
            let mid = Float::with_val(b, &width * p as u32) + &half;
            for (x, w) in gl.0.iter().zip(&gl.1) {
                let r = Float::with_val(b, x * &half) + &mid;
                let e = Float::with_val(b, -Float::with_val(b, &decay * &r)).exp() * w;
                let js = spherical_bessel_seq(lmax, &Float::with_val(b, kmag * &r), ctx);
                for (k, (t, (pi, pf))) in terms.iter().zip(polys).enumerate() {
                    let rp = Float::with_val(b, (&r).pow(t.l + t.lf + 2));
                    let v = rp * &e * pi.eval(&r, b) * pf.eval(&r, b) * &js[t.l2 as usize];
                    acc[k].1 += Float::with_val(b, v.abs_ref());
                    acc[k].0 += v;
                }
            }
            for a in acc.iter_mut() {
                a.0 *= &half;
                a.1 *= &half;
            }
            acc
        })
        .collect();
    let mut out = vec![RadialEstimate { value: Float::new(b), magnitude: Float::new(b) }; terms.len()];
    for row in per_panel {
        for (o, (v, a)) in out.iter_mut().zip(row) {
            o.value += v;
            o.magnitude += a;
        }
    }
    out
}

/// Cut-off radius where every term's envelope has fallen below ENVELOPE of its peak.
fn cutoff(ch: &Channel, terms: &[RadialTerm], polys: &[(Poly, Poly)]) -> f64 {
    let decay = ch.alpha.to_f64() + ch.beta.to_f64();
    let step = 0.25 / decay;
    let mut r_max: f64 = step;
    for (t, (pi, pf)) in terms.iter().zip(polys) {
        let env = |r: f64| r.powi((t.l + t.lf + 2) as i32) * (-decay * r).exp() * pi.bound(r) * pf.bound(r);
        let (mut peak, mut r) = (0.0f64, step);
        loop {
            let e = env(r);
            peak = peak.max(e);
            if e < ENVELOPE * peak && r * decay > (t.l + t.lf + 2 + t.n + t.nf) as f64 {
                break;
            }
            r += step;
        }
        r_max = r_max.max(r);
    }
    r_max
}

/// Evaluate many radial integrals sharing a channel and |k| on one node set.
pub fn radial_quadrature_many(ch: &Channel, terms: &[RadialTerm], kmag: &Real, ctx: &PrecisionContext) -> Result<Vec<RadialEstimate>> {
    if terms.is_empty() {
        return Ok(Vec::new());
    }
    let b = ctx.bits;
    for t in terms {
        if t.l > t.n || t.lf > t.nf {
            return Err(Error::BadQuantumNumbers(format!("{t:?}")));
        }
    }
    let ta = Float::with_val(b, &ch.alpha * 2u32);
    let tb = Float::with_val(b, &ch.beta * 2u32);
    let polys: Vec<(Poly, Poly)> = terms
        .iter()
        .map(|t| (Poly::kummer(t.n, t.l, &ta, ctx), Poly::kummer(t.nf, t.lf, &tb, ctx)))
        .collect();
    let r_max = cutoff(ch, terms, &polys);
    let decay = ch.alpha.to_f64() + ch.beta.to_f64();
    let mut width = 1.0 / decay;
    let k = kmag.to_f64();
    if k > 0.0 {
        width = width.min(std::f64::consts::PI / (2.0 * k));
    }
    let mut panels = (r_max / width).ceil().max(1.0) as usize;
    let rr = ctx.f64(r_max);
    let gl = gauss_legendre(GL_POINTS, ctx);
    let mut prev = panel_sums(ch, terms, &polys, kmag, &rr, panels, &gl, ctx);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let cur = panel_sums(ch, terms, &polys, kmag, &rr, panels, &gl, ctx);
        let done = prev.iter().zip(&cur).all(|(a, c)| {
            let d = Float::with_val(b, &a.value - &c.value).abs().to_f64();
            d <= REL_TOL * c.value.to_f64().abs().max(1e-16 * c.magnitude.to_f64())
        });
        if done {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!("radial quadrature after {panels} panels")))
}

/// ∫₀^∞ r^{l+l'+2} e^{−(α+β)r} j_{l2}(kr) Φ Φ dr for one transition.
pub fn radial_quadrature(t: &TransitionSpec, l2: u32, kmag: &Real, ctx: &PrecisionContext) -> Result<RadialEstimate> {
    let term = RadialTerm { n: t.initial.n, l: t.initial.l, nf: t.final_.n, lf: t.final_.l, l2 };
    Ok(radial_quadrature_many(&t.channel, &[term], kmag, ctx)?.remove(0))
}

/// Product rule on S³ with y0 = cos χ, y3 = sin χ cos θ, (y1, y2) = sin χ sin θ (cos φ, sin φ).
/// Exact for polynomials in the components of degree ≤ 2·n_max + 2.
pub fn s3_quadrature<F>(f: F, n_max: u32, ctx: &PrecisionContext) -> Complex
where
    F: Fn(&UnitVec4) -> Complex + Sync,
{
    let b = ctx.bits;
    let deg = 2 * n_max as usize + 2;
    let n_chi = deg / 2 + 1;
    let n_theta = deg / 2 + 1;
    let n_phi = deg + 1;
    let pi = ctx.pi();
    let cheb: Vec<(Real, Real, Real)> = (1..=n_chi)
        .map(|i| {
            let a = Float::with_val(b, &pi * i as u32) / (n_chi as u32 + 1);
            let (s, c) = a.sin_cos(Float::new(b));
            let w = Float::with_val(b, s.square_ref()) * &pi / (n_chi as u32 + 1);
            (c, s, w)
        })
        .collect();
    let (tx, tw) = gauss_legendre(n_theta, ctx);
    let phis: Vec<(Real, Real)> = (0..n_phi)
        .map(|j| {
            let a = Float::with_val(b, &pi * (2 * j as u32)) / n_phi as u32;
            let (s, c) = a.sin_cos(Float::new(b));
            (c, s)
        })
        .collect();
    let dphi = Float::with_val(b, &pi * 2u32) / n_phi as u32;
    let parts: Vec<Complex> = cheb
        .par_iter()
        .map(|(c_chi, s_chi, w_chi)| {
            let mut acc = Complex::zero(b);
            for (ct, wt) in tx.iter().zip(&tw) {
                let st = Float::with_val(b, 1u32 - Float::with_val(b, ct.square_ref())).sqrt();
                let rho = Float::with_val(b, s_chi * &st);
                let y3 = Float::with_val(b, s_chi * ct);
                let w = Float::with_val(b, w_chi * wt) * &dphi;
                for (cp, sp) in &phis {
                    let y = UnitVec4 {
                        c: [
                            Float::with_val(b, &rho * cp),
                            Float::with_val(b, &rho * sp),
                            y3.clone(),
                            c_chi.clone(),
                        ],
                    };
                    acc = acc.add(&f(&y).scale(&w));
                }
            }
            acc
        })
        .collect();
    parts.iter().fold(Complex::zero(b), |a, p| a.add(p))
}

/// Both sides of the multipole expansion of q⁻⁴ C_nlm(x̂) in the harmonics
/// C_{n3 l3 m3}(ŷ), truncated at n3 ≤ n3_max. Returns (lhs, rhs).
#[allow(clippy::too_many_arguments)]
pub fn expansion_check(
    n: u32,
    l: u32,
    m: i64,
    ch: &Channel,
    kvec: &Vec3,
    pvec: &Vec3,
    n3_max: u32,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    let b = ctx.bits;
    let qv = [
        Float::with_val(b, &pvec[0] - &kvec[0]),
        Float::with_val(b, &pvec[1] - &kvec[1]),
        Float::with_val(b, &pvec[2] - &kvec[2]),
    ];
    let q2 = norm2(&qv) + Float::with_val(b, ch.alpha.square_ref());
    if q2.is_zero() {
        return Err(Error::DegenerateQ);
    }
    let x = project_x(pvec, kvec, &ch.alpha, ctx);
    let lhs = hsh_evaluate(n, l, m, &x, ctx)?.scale(&Float::with_val(b, q2.square_ref()).recip());
    let kin = kinematics_of(ch, kvec, ctx);
    let y = project_y(pvec, &ch.beta, ctx);
    let mut rhs = Complex::zero(b);
    for n3 in 0..=n3_max {
        for l3 in 0..=n3 {
            let mut l2 = l.abs_diff(l3);
            while l2 <= l + l3 {
                let c0 = clebsch3d(l as i64, 0, l2 as i64, 0, l3 as i64, 0, ctx);
                if c0.is_zero() {
                    l2 += 2;
                    continue;
                }
                let bb = coeff_b(PIndex::new(n, l, n3, l3, l2)?, &kin, ctx)?;
                if bb.is_zero() {
                    l2 += 2;
                    continue;
                }
                let mut inner = Complex::zero(b);
                for m2 in -(l2 as i64)..=l2 as i64 {
                    let m3 = m - m2;
                    if m3.unsigned_abs() > l3 as u64 {
                        continue;
                    }
                    let cg = clebsch3d(l2 as i64, m2, l3 as i64, m3, l as i64, m, ctx);
                    if cg.is_zero() {
                        continue;
                    }
                    let ang = racah_harmonic(l2 as i64, m2, &kin.theta, &kin.phi, ctx);
                    let h = hsh_evaluate(n3, l3, m3, &y, ctx)?;
                    inner = inner.add(&ang.mul(&h).scale(&cg));
                }
                let mut term = inner.scale(&(bb * c0));
                term = term.mul_i_pow(l3 as i64 - l as i64 - l2 as i64);
                if (n + n3) % 2 == 1 {
                    term = term.scale(&ctx.int(-1));
                }
                rhs = rhs.add(&term);
                l2 += 2;
            }
        }
    }
    let p2 = norm2(pvec) + Float::with_val(b, ch.beta.square_ref());
    let pref = (Float::with_val(b, ch.alpha.square_ref()) * p2 * 2u32).recip();
    Ok((lhs, rhs.scale(&pref)))
}

/// f(𝐩) = |𝐩|⁻² Σ (solid harmonic at −e + 2s𝐩/|𝐩|²) with 𝐩 a free 4-vector.
fn inverted(n: u32, l: u32, m: i64, s: &Real, p: &[Real; 4], ctx: &PrecisionContext) -> Result<Complex> {
    let b = ctx.bits;
    let mut p2 = Float::new(b);
    for c in p {
        p2 += Float::with_val(b, c.square_ref());
    }
    let f = Float::with_val(b, s * 2u32) / &p2;
    let y = [
        Float::with_val(b, &p[0] * &f),
        Float::with_val(b, &p[1] * &f),
        Float::with_val(b, &p[2] * &f),
        Float::with_val(b, &p[3] * &f) - 1u32,
    ];
    Ok(hsh_solid(n, l, m, &y, ctx)?.scale(&p2.recip()))
}

fn fd_laplacian(
    g: &dyn Fn(&[Real; 4]) -> Result<Complex>,
    at: &[Real; 4],
    h: &Real,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let b = ctx.bits;
    let centre = g(at)?.scale(&ctx.int(-8));
    let mut acc = centre;
    for i in 0..4 {
        for sgn in [1i32, -1] {
            let mut q = at.clone();
            q[i] += Float::with_val(b, h * sgn);
            acc = acc.add(&g(&q)?);
        }
    }
    let h2 = Float::with_val(b, h.square_ref());
    Ok(acc.abs() / h2)
}

/// Central-difference 4D Laplacian of |𝐩|⁻² C_nlm(ŷ) and |𝐪|⁻² C_nlm(x̂) at
/// 𝐩 = (p⃗, p0), 𝐪 = 𝐩 − (k⃗, β − α). Returns the larger |residual|.
#[allow(clippy::too_many_arguments)]
pub fn laplace_fd_check(
    n: u32,
    l: u32,
    m: i64,
    ch: &Channel,
    kvec: &Vec3,
    pvec: &Vec3,
    p0: &Real,
    h: &Real,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let b = ctx.bits;
    if *h <= 0 {
        return Err(Error::InvalidArgument("step h must be positive".into()));
    }
    let p = [pvec[0].clone(), pvec[1].clone(), pvec[2].clone(), ctx.real(p0)];
    let k0 = Float::with_val(b, &ch.beta - &ch.alpha);
    let q = [
        Float::with_val(b, &p[0] - &kvec[0]),
        Float::with_val(b, &p[1] - &kvec[1]),
        Float::with_val(b, &p[2] - &kvec[2]),
        Float::with_val(b, &p[3] - &k0),
    ];
    let len = |v: &[Real; 4]| v.iter().fold(Float::new(b), |a, c| a + Float::with_val(b, c.square_ref())).sqrt();
    let guard = Float::with_val(b, h * 4u32);
    if len(&p) <= guard || len(&q) <= guard {
        return Err(Error::SingularPoint);
    }
    let fp = |v: &[Real; 4]| inverted(n, l, m, &ch.beta, v, ctx);
    let shift = [kvec[0].clone(), kvec[1].clone(), kvec[2].clone(), k0.clone()];
    let fq = |v: &[Real; 4]| {
        let w: [Real; 4] = std::array::from_fn(|i| Float::with_val(b, &v[i] - &shift[i]));
        inverted(n, l, m, &ch.alpha, &w, ctx)
    };
    let a = fd_laplacian(&fp, &p, h, ctx)?;
    let c = fd_laplacian(&fq, &p, h, ctx)?;
    Ok(if a > c { a } else { c })
}

/// Observed order log2(r(h)/r(h/2)) for residuals taken at successively halved steps.
pub fn measured_orders(residuals: &[Real]) -> Vec<f64> {
    residuals
        .windows(2)
        .map(|w| (w[0].to_f64() / w[1].to_f64()).log2())
        .collect()
}
