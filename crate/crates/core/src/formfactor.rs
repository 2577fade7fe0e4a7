//! Physical matrix elements assembled from the P coefficients: form factors
//! F = <n'l'm'| e^{i k·r} |nlm>, radial integrals, generalized oscillator
//! strength scans and the D coefficients of the solid-harmonic expansion.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::exactmath::{
    clebsch3d, factorial_exact, hyp3f2_terminating, racah_harmonic, Complex, PrecisionContext, Real,
};
use crate::fockgeom::{kinematics_of, Channel, Kinematics, Vec3};
use crate::pcoeff::{p_1s, p_series, PEvaluator, PIndex};

/// Bound state label; `n` is the principal quantum number minus one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundLabel {
    pub n: u32,
    pub l: u32,
    pub m: i64,
}

impl BoundLabel {
    pub fn new(n: u32, l: u32, m: i64) -> Result<Self> {
        if l > n {
            return Err(Error::BadQuantumNumbers(format!("l exceeds n (n={n}, l={l})")));
        }
        if m.unsigned_abs() > l as u64 {
            return Err(Error::BadQuantumNumbers(format!("|m| exceeds l (l={l}, m={m})")));
        }
        Ok(BoundLabel { n, l, m })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Hydrogen,
    Sturmian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSpec {
    pub initial: BoundLabel,
    pub final_: BoundLabel,
    pub channel: Channel,
    pub mode: Mode,
}

impl TransitionSpec {
    /// Hydrogen-like ion of charge z: alpha = z/(n+1), beta = z/(n'+1).
    pub fn hydrogen(z: &Real, initial: BoundLabel, final_: BoundLabel, ctx: &PrecisionContext) -> Result<Self> {
        let channel = Channel::hydrogen(z, initial.n, final_.n, ctx)?;
        Ok(TransitionSpec { initial, final_, channel, mode: Mode::Hydrogen })
    }

    pub fn sturmian(alpha: Real, beta: Real, initial: BoundLabel, final_: BoundLabel) -> Result<Self> {
        let channel = Channel::new(alpha, beta)?;
        Ok(TransitionSpec { initial, final_, channel, mode: Mode::Sturmian })
    }

    fn index(&self, l2: u32) -> Result<PIndex> {
        PIndex::new(self.initial.n, self.initial.l, self.final_.n, self.final_.l, l2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormFactor {
    pub value: Complex,
    pub transition: TransitionSpec,
    pub kin: Kinematics,
    pub l2_terms: Vec<(u32, Complex)>,
}

fn sqrt_factorial_ratio(n: u32, l: u32, n3: u32, l3: u32, bits: u32) -> Real {
    let r = Rational::from((
        factorial_exact(n + l + 1) * factorial_exact(n3 + l3 + 1),
        factorial_exact(n - l) * factorial_exact(n3 - l3),
    ));
    Float::with_val(bits, r).sqrt()
}

/// k/β expressed through the kinematic scalars (2 v sin θ₀).
fn k_over_beta(kin: &Kinematics, bits: u32) -> Real {
    Float::with_val(bits, &kin.v * &kin.sin_theta0) * 2u32
}

/// B^(l2)_{n,l;n3,l3} = −(k/β)^{l2} l2!(2l2+1)/(2(n+1))
/// · sqrt((n+l+1)!(n3+l3+1)!/((n−l)!(n3−l3)!)) · P.
pub fn coeff_b(idx: PIndex, kin: &Kinematics, ctx: &PrecisionContext) -> Result<Real> {
    coeff_b_using(idx, kin, p_series, ctx)
}

pub fn coeff_b_using(idx: PIndex, kin: &Kinematics, eval: PEvaluator, ctx: &PrecisionContext) -> Result<Real> {
    idx.validate()?;
    let b = ctx.bits;
    if idx.l2 > 0 && kin.kmag.is_zero() {
        return Ok(ctx.zero());
    }
    let p = eval(idx, &kin.u, &kin.w, ctx)?.value;
    let kb = Float::with_val(b, k_over_beta(kin, b).pow(idx.l2));
    let pref = Rational::from((factorial_exact(idx.l2) * (2 * idx.l2 + 1), 2 * (idx.n + 1)));
    Ok(-(kb * pref * sqrt_factorial_ratio(idx.n, idx.l, idx.n3, idx.l3, b) * p))
}

/// Full m-resolved form factor. Each multipole enters as
/// (−i)^{l2} C^{l'0}_{l0,l2 0} C^{lm}_{l2 m2,l'm'} C_{l2 m2}(k̂) B^(l2), m2 = m − m'.
pub fn form_factor(t: &TransitionSpec, kvec: &Vec3, ctx: &PrecisionContext) -> Result<FormFactor> {
    form_factor_using(t, kvec, p_series, ctx)
}

pub fn form_factor_using(t: &TransitionSpec, kvec: &Vec3, eval: PEvaluator, ctx: &PrecisionContext) -> Result<FormFactor> {
    let b = ctx.bits;
    let (i, f) = (t.initial, t.final_);
    BoundLabel::new(i.n, i.l, i.m)?;
    BoundLabel::new(f.n, f.l, f.m)?;
    let kin = kinematics_of(&t.channel, kvec, ctx);
    let m2 = i.m - f.m;
    let ratio = Float::with_val(b, &t.channel.alpha * (i.n + 1)) / Float::with_val(b, &t.channel.beta * (f.n + 1));
    let pref = ratio.sqrt();
    let mut value = Complex::zero(b);
    let mut terms = Vec::new();
    let lo = i.l.abs_diff(f.l);
    for l2 in (lo..=i.l + f.l).step_by(2) {
        if m2.unsigned_abs() > l2 as u64 {
            continue;
        }
        let c1 = clebsch3d(i.l as i64, 0, l2 as i64, 0, f.l as i64, 0, ctx);
        let c2 = clebsch3d(l2 as i64, m2, f.l as i64, f.m, i.l as i64, i.m, ctx);
        if c1.is_zero() || c2.is_zero() {
            continue;
        }
        let harm = racah_harmonic(l2 as i64, m2, &kin.theta, &kin.phi, ctx);
        let bcoef = coeff_b_using(t.index(l2)?, &kin, eval, ctx)?;
        let term = harm.scale(&(c1 * c2 * bcoef * &pref)).mul_i_pow(-(l2 as i64));
        value = value.add(&term);
        terms.push((l2, term));
    }
    Ok(FormFactor { value, transition: t.clone(), kin, l2_terms: terms })
}

fn kinematics_for_kmag(ch: &Channel, kmag: &Real, ctx: &PrecisionContext) -> Kinematics {
    let kvec = [ctx.zero(), ctx.zero(), ctx.real(kmag)];
    kinematics_of(ch, &kvec, ctx)
}

/// ∫ r^{l+l'+2} e^{−(α+β)r} j_{l2}(kr) Φ(l'−n', 2l'+2; 2βr) Φ(l−n, 2l+2; 2αr) dr
/// = (−1)^{l+l2+l'+1} l2!(2l+1)!(2l'+1)!/((2α)^{l+1}(2β)^{l'+2}) (k/β)^{l2} P.
pub fn radial_matrix_element(t: &TransitionSpec, l2: u32, kmag: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let idx = t.index(l2)?;
    let b = ctx.bits;
    let (l, lf) = (t.initial.l, t.final_.l);
    let kin = kinematics_for_kmag(&t.channel, kmag, ctx);
    let p = p_series(idx, &kin.u, &kin.w, ctx)?.value;
    let kb = Float::with_val(b, kmag / &t.channel.beta);
    let kb = Float::with_val(b, kb.pow(l2));
    let ta = Float::with_val(b, &t.channel.alpha * 2u32);
    let tb = Float::with_val(b, &t.channel.beta * 2u32);
    let den = Float::with_val(b, ta.pow(l + 1)) * Float::with_val(b, tb.pow(lf + 2));
    let num = factorial_exact(l2) * factorial_exact(2 * l + 1) * factorial_exact(2 * lf + 1);
    let v = p * kb * num / den;
    Ok(if (l + l2 + lf + 1) % 2 == 1 { -v } else { v })
}

/// Normalised radial integral ∫ R_{00}(α, r) j_{l3}(kr) R_{n3 l3}(β, r) r² dr
/// from the 1s closed form.
pub fn form_factor_1s(n3: u32, l3: u32, ch: &Channel, kmag: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let b = ctx.bits;
    let kin = kinematics_for_kmag(ch, kmag, ctx);
    let p = p_1s(n3, l3, &kin.u, &kin.w, ctx)?.value;
    let kb = Float::with_val(b, kmag / &ch.beta);
    let kb = Float::with_val(b, kb.pow(l3));
    let r = Rational::from((factorial_exact(n3 + l3 + 1), factorial_exact(n3 - l3) * (n3 + 1)));
    let root = (Float::with_val(b, &ch.alpha / &ch.beta) * r).sqrt();
    Ok(-(p * kb * root * factorial_exact(l3) / 2u32))
}

/// True inside the region where the solid-harmonic expansion in n2 converges:
/// α < β and (α−β)² + k² < 2β.
pub fn in_convergence_region(ch: &Channel, kmag: &Real) -> bool {
    let b = ch.alpha.prec();
    let d = Float::with_val(b, &ch.alpha - &ch.beta);
    let lhs = Float::with_val(b, d.square_ref()) + Float::with_val(b, kmag.square_ref());
    ch.alpha < ch.beta && lhs < Float::with_val(b, &ch.beta * 2u32)
}

fn d_prefactor(n: u32, l: u32, n2: u32, n3: u32, l3: u32, l2: u32, beta: &Real, ctx: &PrecisionContext) -> Real {
    let b = ctx.bits;
    let r = Rational::from((
        factorial_exact(n + l + 1) * factorial_exact(n - l) * (2 * l2 + 1),
        factorial_exact(n3 + l3 + 1) * factorial_exact(n3 - l3) * factorial_exact(n2 + l2 + 1) * factorial_exact(n2 - l2),
    ));
    let tb = Float::with_val(b, beta * 2u32);
    let v = Float::with_val(b, r).sqrt() / Float::with_val(b, tb.pow(n2));
    if l2 % 2 == 1 {
        -v
    } else {
        v
    }
}

fn check_d(n: u32, l: u32, n2: u32, n3: u32, l3: u32, l2: u32, ch: &Channel, kmag: &Real) -> Result<()> {
    if l > n || l3 > n3 || l2 > n2 {
        return Err(Error::IndexViolation(format!(
            "D coefficient needs l <= n, l3 <= n3, l2 <= n2 (n={n}, l={l}, n2={n2}, n3={n3}, l3={l3}, l2={l2})"
        )));
    }
    if !in_convergence_region(ch, kmag) {
        return Err(Error::ConvergenceRegionViolated(format!(
            "need alpha < beta and (alpha-beta)^2 + k^2 < 2 beta (alpha={}, beta={}, k={})",
            ch.alpha.to_f64(),
            ch.beta.to_f64(),
            kmag.to_f64()
        )));
    }
    Ok(())
}

/// D_{n2 n3, l l3} as the finite n1-sum.
#[allow(clippy::too_many_arguments)]
pub fn coeff_d_sum(n: u32, l: u32, n2: u32, n3: u32, l3: u32, l2: u32, ch: &Channel, kmag: &Real, ctx: &PrecisionContext) -> Result<Real> {
    check_d(n, l, n2, n3, l3, l2, ch, kmag)?;
    let b = ctx.bits;
    let mut acc = ctx.zero();
    let mut up = ctx.one();
    for n1 in 0..=n {
        if n1 >= l && n1 + n2 >= n3 && n1 + n2 >= l3 {
            let r = Rational::from((
                factorial_exact(n1 + n2 + l3 + 1) * factorial_exact(n1 + n2 - l3),
                factorial_exact(n - n1) * factorial_exact(n1 + n2 - n3) * factorial_exact(n1 + l + 1) * factorial_exact(n1 - l),
            ));
            acc += Float::with_val(b, &up * &r);
        }
        up *= &ch.u;
    }
    Ok(acc * d_prefactor(n, l, n2, n3, l3, l2, &ch.beta, ctx))
}

/// D_{n2 n3, l l3} in its 3F2 form.
#[allow(clippy::too_many_arguments)]
pub fn coeff_d(n: u32, l: u32, n2: u32, n3: u32, l3: u32, l2: u32, ch: &Channel, kmag: &Real, ctx: &PrecisionContext) -> Result<Real> {
    check_d(n, l, n2, n3, l3, l2, ch, kmag)?;
    if n2 + l < n3 {
        return Err(Error::DegenerateDenominator);
    }
    let b = ctx.bits;
    let (n_, l_, n2_, n3_, l3_) = (n as i64, l as i64, n2 as i64, n3 as i64, l3 as i64);
    let mu = -ctx.real(&ch.u);
    let f = hyp3f2_terminating(
        l_ - n_,
        &ctx.int(n2_ + l_ - l3_ + 1),
        &ctx.int(n2_ + l_ + l3_ + 2),
        &ctx.int(n2_ - n3_ + l_ + 1),
        &ctx.int(2 * l_ + 2),
        &mu,
        ctx,
    )?;
    let r = Rational::from((
        factorial_exact(n2 + l + l3 + 1) * factorial_exact(n2 + l - l3),
        factorial_exact(n2 + l - n3) * factorial_exact(n - l) * factorial_exact(2 * l + 1),
    ));
    let ul = Float::with_val(b, (&ch.u).pow(l));
    Ok(f * r * ul * d_prefactor(n, l, n2, n3, l3, l2, &ch.beta, ctx))
}

/// One row of a generalized-oscillator-strength scan.
#[derive(Clone, Debug, PartialEq)]
pub struct GosRow {
    pub lnk: Real,
    pub k: Real,
    /// |F|² summed over the final magnetic quantum number.
    pub abs_f2: Real,
    /// Σ_{m'} |F_{l2}|² for each l2 = 0..=l+l' (zero where parity forbids).
    pub l2_partials: Vec<Real>,
}

/// |F(k)|² along k⃗ ∥ z for every ln k in the grid, summed over m'.
pub fn gos_scan(t: &TransitionSpec, lnk_grid: &[Real], ctx: &PrecisionContext) -> Result<Vec<GosRow>> {
    gos_scan_using(t, lnk_grid, p_series, ctx)
}

pub fn gos_scan_using(t: &TransitionSpec, lnk_grid: &[Real], eval: PEvaluator, ctx: &PrecisionContext) -> Result<Vec<GosRow>> {
    let b = ctx.bits;
    let lmax = t.initial.l + t.final_.l;
    lnk_grid
        .par_iter()
        .map(|lnk| {
            let k = Float::with_val(b, lnk.exp_ref());
            let kvec = [ctx.zero(), ctx.zero(), k.clone()];
            let mut abs_f2 = ctx.zero();
            let mut partials = vec![ctx.zero(); lmax as usize + 1];
            for mf in -(t.final_.l as i64)..=(t.final_.l as i64) {
                let mut tt = t.clone();
                tt.final_.m = mf;
                let ff = form_factor_using(&tt, &kvec, eval, ctx)?;
                abs_f2 += ff.value.norm_sqr();
                for (l2, term) in &ff.l2_terms {
                    partials[*l2 as usize] += term.norm_sqr();
                }
            }
            Ok(GosRow { lnk: ctx.real(lnk), k, abs_f2, l2_partials: partials })
        })
        .collect()
}
