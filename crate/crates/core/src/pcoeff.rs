//! Multipole coefficients P^(l2)_{n,l;n3,l3}(u, w).
//!
//! Two general backends that share no code path beyond basic arithmetic:
//!
//! * [`p_series`] extracts the nested derivatives
//!   `u^-l / ((n+l+1)!(n3+l3+1)!) ∂τ^{n-l} [(u+τ)^{n+l+1} ∂t^{n3-l3} [(1+t)^{n3+l3+1} ∂τ^d G]]`
//!   at t = τ = 0, with `G = [w² + (1+u)(t+τ) + (t+τ)²]^{-l2-1}` and
//!   `d = l - l2 + l3 + 1`, by truncated power-series arithmetic.
//! * [`p_gegenbauer`] sums Gegenbauer polynomials with polynomial-in-u
//!   weights `C_q(u)`.
//!
//! Closed forms cover the 1s initial state and the k → 0 dipole limit.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::exactmath::{binomial_exact, factorial_exact, gegenbauer_homogeneous, PrecisionContext, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PIndex {
    pub n: u32,
    pub l: u32,
    pub n3: u32,
    pub l3: u32,
    pub l2: u32,
}

impl std::fmt::Display for PIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(n={}, l={}, n3={}, l3={}, l2={})", self.n, self.l, self.n3, self.l3, self.l2)
    }
}

impl PIndex {
    pub fn new(n: u32, l: u32, n3: u32, l3: u32, l2: u32) -> Result<Self> {
        let idx = PIndex { n, l, n3, l3, l2 };
        idx.validate()?;
        Ok(idx)
    }

    /// Signed constructor for shifted indices; any negative entry is a violation.
    pub fn from_signed(n: i64, l: i64, n3: i64, l3: i64, l2: i64) -> Result<Self> {
        if n < 0 || l < 0 || n3 < 0 || l3 < 0 || l2 < 0 {
            return Err(Error::IndexViolation(format!(
                "negative index in (n={n}, l={l}, n3={n3}, l3={l3}, l2={l2})"
            )));
        }
        PIndex::new(n as u32, l as u32, n3 as u32, l3 as u32, l2 as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l > self.n {
            return Err(Error::IndexViolation(format!("l exceeds n in {self}")));
        }
        if self.l3 > self.n3 {
            return Err(Error::IndexViolation(format!("l3 exceeds n3 in {self}")));
        }
        if self.l2 > self.l + self.l3 + 1 {
            return Err(Error::IndexViolation(format!("l - l2 + l3 + 1 < 0 in {self}")));
        }
        Ok(())
    }

    /// Order of the inner τ-derivative, l − l2 + l3 + 1.
    pub fn d(&self) -> u32 {
        self.l + self.l3 + 1 - self.l2
    }

    pub fn q_max(&self) -> u32 {
        self.n + self.n3 - self.l - self.l3
    }

    /// Triangle and parity conditions required when the coefficient enters a
    /// form factor.
    pub fn form_factor_admissible(&self) -> bool {
        self.l2 >= self.l.abs_diff(self.l3) && self.l2 <= self.l + self.l3 && (self.l + self.l2 + self.l3) % 2 == 0
    }

    pub fn swapped(&self) -> PIndex {
        PIndex { n: self.n3, l: self.l3, n3: self.n, l3: self.l, l2: self.l2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Series,
    Gegenbauer,
    Closed1s,
    ClosedDipole,
    Recurrence,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Series => "series",
            Backend::Gegenbauer => "gegenbauer",
            Backend::Closed1s => "closed_1s",
            Backend::ClosedDipole => "closed_dipole",
            Backend::Recurrence => "recurrence",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PValue {
    pub index: PIndex,
    pub u: Real,
    pub w: Real,
    pub value: Real,
    pub backend: Backend,
}

fn check_uw(u: &Real, w: &Real) -> Result<()> {
    if u.is_zero() {
        return Err(Error::DegenerateU);
    }
    if !u.is_finite() || *u < 0 {
        return Err(Error::InvalidArgument(format!("u must be positive (u={})", u.to_f64())));
    }
    if !w.is_finite() || *w <= 0 {
        return Err(Error::InvalidArgument(format!("w must be positive (w={})", w.to_f64())));
    }
    Ok(())
}

/// Truncated bivariate power series in (t, τ); `c[i][j]` multiplies t^i τ^j.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    pub t_max: usize,
    pub tau_max: usize,
    c: Vec<Real>,
}

impl BiSeries {
    pub fn zeros(t_max: usize, tau_max: usize, bits: u32) -> Self {
        BiSeries { t_max, tau_max, c: vec![Float::new(bits); (t_max + 1) * (tau_max + 1)] }
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * (self.tau_max + 1) + j
    }

    pub fn coeff(&self, i: usize, j: usize) -> &Real {
        &self.c[self.at(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Real) {
        let k = self.at(i, j);
        self.c[k] = v;
    }

    /// Σ h_k (t+τ)^k truncated to the table.
    pub fn from_sum_variable(h: &[Real], t_max: usize, tau_max: usize, bits: u32) -> Self {
        let mut s = BiSeries::zeros(t_max, tau_max, bits);
        for i in 0..=t_max {
            for j in 0..=tau_max {
                if let Some(hk) = h.get(i + j) {
                    let b = binomial_exact((i + j) as u32, i as i64);
                    s.set(i, j, Float::with_val(bits, hk * &b));
                }
            }
        }
        s
    }

    pub fn add(&self, o: &BiSeries) -> BiSeries {
        let tm = self.t_max.min(o.t_max);
        let um = self.tau_max.min(o.tau_max);
        let bits = self.c[0].prec();
        let mut r = BiSeries::zeros(tm, um, bits);
        for i in 0..=tm {
            for j in 0..=um {
                r.set(i, j, Float::with_val(bits, self.coeff(i, j) + o.coeff(i, j)));
            }
        }
        r
    }

    pub fn mul(&self, o: &BiSeries) -> BiSeries {
        let tm = self.t_max.min(o.t_max);
        let um = self.tau_max.min(o.tau_max);
        let bits = self.c[0].prec();
        let mut r = BiSeries::zeros(tm, um, bits);
        for i1 in 0..=tm {
            for j1 in 0..=um {
                let a = self.coeff(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=(tm - i1) {
                    for j2 in 0..=(um - j1) {
                        let k = r.at(i1 + i2, j1 + j2);
                        r.c[k] += Float::with_val(bits, a * o.coeff(i2, j2));
                    }
                }
            }
        }
        r
    }

    /// Multiply by a polynomial in t alone.
    pub fn mul_t(&self, p: &[Real]) -> BiSeries {
        let bits = self.c[0].prec();
        let mut r = BiSeries::zeros(self.t_max, self.tau_max, bits);
        for i in 0..=self.t_max {
            for (a, pa) in p.iter().enumerate().take(i + 1) {
                for j in 0..=self.tau_max {
                    let k = r.at(i, j);
                    r.c[k] += Float::with_val(bits, pa * self.coeff(i - a, j));
                }
            }
        }
        r
    }

    /// Multiply by a polynomial in τ alone.
    pub fn mul_tau(&self, p: &[Real]) -> BiSeries {
        let bits = self.c[0].prec();
        let mut r = BiSeries::zeros(self.t_max, self.tau_max, bits);
        for i in 0..=self.t_max {
            for j in 0..=self.tau_max {
                for (b, pb) in p.iter().enumerate().take(j + 1) {
                    let k = r.at(i, j);
                    r.c[k] += Float::with_val(bits, pb * self.coeff(i, j - b));
                }
            }
        }
        r
    }

    pub fn diff_t(&self) -> BiSeries {
        let bits = self.c[0].prec();
        let tm = self.t_max.saturating_sub(1);
        let mut r = BiSeries::zeros(tm, self.tau_max, bits);
        if self.t_max == 0 {
            return r;
        }
        for i in 0..=tm {
            for j in 0..=self.tau_max {
                r.set(i, j, Float::with_val(bits, self.coeff(i + 1, j) * (i as u32 + 1)));
            }
        }
        r
    }

    pub fn diff_tau(&self) -> BiSeries {
        let bits = self.c[0].prec();
        let um = self.tau_max.saturating_sub(1);
        let mut r = BiSeries::zeros(self.t_max, um, bits);
        if self.tau_max == 0 {
            return r;
        }
        for i in 0..=self.t_max {
            for j in 0..=um {
                r.set(i, j, Float::with_val(bits, self.coeff(i, j + 1) * (j as u32 + 1)));
            }
        }
        r
    }

    /// ∂t^k at t = 0, leaving a series in τ.
    pub fn t_derivative_at_zero(&self, k: usize) -> Vec<Real> {
        let bits = self.c[0].prec();
        let f = Integer::from(Integer::factorial(k as u32));
        (0..=self.tau_max)
            .map(|j| {
                if k > self.t_max {
                    Float::new(bits)
                } else {
                    Float::with_val(bits, self.coeff(k, j) * &f)
                }
            })
            .collect()
    }

    pub fn eval_at_zero(&self) -> Real {
        self.c[0].clone()
    }
}

/// Taylor coefficients of (f0 + f1 s + f2 s²)^alpha up to s^order (Miller's
/// power recurrence; f0 ≠ 0).
fn power_series_quadratic(f: [&Real; 3], alpha: i64, order: usize, bits: u32) -> Vec<Real> {
    let mut g = Vec::with_capacity(order + 1);
    g.push(Float::with_val(bits, f[0].pow(alpha as i32)));
    for k in 1..=order {
        let mut acc = Float::new(bits);
        for j in 1..=k.min(2) {
            let c = (alpha + 1) * j as i64 - k as i64;
            if c != 0 {
                acc += Float::with_val(bits, f[j] * &g[k - j]) * c;
            }
        }
        acc /= Float::with_val(bits, f[0] * k as u32);
        g.push(acc);
    }
    g
}

fn binomial_poly(a: u32, x0: &Real, bits: u32) -> Vec<Real> {
    // (x0 + s)^a = Σ C(a,j) x0^{a-j} s^j
    (0..=a)
        .map(|j| Float::with_val(bits, x0.pow(a - j)) * binomial_exact(a, j as i64))
        .collect()
}

/// Series-extraction backend.
pub fn p_series(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<PValue> {
    idx.validate()?;
    check_uw(u, w)?;
    let b = ctx.bits;
    let t_ord = (idx.n3 - idx.l3) as usize;
    let tau_ord = (idx.n - idx.l) as usize;
    let d = idx.d() as usize;
    let u = ctx.real(u);
    let w = ctx.real(w);

    let f0 = Float::with_val(b, w.square_ref());
    let f1 = Float::with_val(b, &u + 1u32);
    let f2 = ctx.one();
    let g = power_series_quadratic([&f0, &f1, &f2], -(idx.l2 as i64) - 1, t_ord + tau_ord + d, b);
    // d-th derivative in s
    let h: Vec<Real> = (0..=t_ord + tau_ord)
        .map(|k| {
            let ff = Integer::from(Integer::factorial((k + d) as u32)) / Integer::from(Integer::factorial(k as u32));
            Float::with_val(b, &g[k + d] * &ff)
        })
        .collect();
    let inner = BiSeries::from_sum_variable(&h, t_ord, tau_ord, b);
    let one = ctx.one();
    let with_t = inner.mul_t(&binomial_poly(idx.n3 + idx.l3 + 1, &one, b));
    let tau_series = with_t.t_derivative_at_zero(t_ord);
    let ups = binomial_poly(idx.n + idx.l + 1, &u, b);
    let mut acc = Float::new(b);
    for j in 0..=tau_ord {
        acc += Float::with_val(b, &tau_series[j] * &ups[tau_ord - j]);
    }
    acc *= Integer::from(Integer::factorial(tau_ord as u32));
    let den = factorial_exact(idx.n + idx.l + 1) * factorial_exact(idx.n3 + idx.l3 + 1);
    let value = acc / den / Float::with_val(b, (&u).pow(idx.l));
    Ok(PValue { index: idx, u, w, value, backend: Backend::Series })
}

/// Exact coefficients of C_q(u) in powers of u.
pub fn c_q_coefficients(idx: PIndex, q: u32) -> Result<Vec<Rational>> {
    idx.validate()?;
    if q > idx.q_max() {
        return Err(Error::IndexViolation(format!("q = {q} exceeds q_max = {} for {idx}", idx.q_max())));
    }
    let (nl, nl3) = (idx.n - idx.l, idx.n3 - idx.l3);
    let top = factorial_exact(idx.d() + q);
    let mut out = Vec::new();
    for m in 0..=nl.min(q) {
        let c3 = binomial_exact(nl3, (q - m) as i64);
        if c3 == 0 {
            out.push(Rational::new());
            continue;
        }
        let num = binomial_exact(nl, m as i64) * c3 * &top;
        let den = factorial_exact(2 * idx.l + 1 + m) * factorial_exact(2 * idx.l3 + q + 1 - m);
        out.push(Rational::from((num, den)));
    }
    Ok(out)
}

fn eval_poly_rational(coeffs: &[Rational], u: &Real, bits: u32) -> Real {
    let mut acc = Float::new(bits);
    for c in coeffs.iter().rev() {
        acc *= u;
        acc += c;
    }
    acc
}

/// C_q(u) = Σ_m C(n−l, m) C(n3−l3, q−m) (l−l2+l3+q+1)! / ((2l+1+m)! (2l3+q+1−m)!) u^m.
pub fn c_q(idx: PIndex, q: u32, u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    Ok(eval_poly_rational(&c_q_coefficients(idx, q)?, u, ctx.bits))
}

/// Gegenbauer-sum backend.
pub fn p_gegenbauer(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<PValue> {
    idx.validate()?;
    check_uw(u, w)?;
    let b = ctx.bits;
    let u = ctx.real(u);
    let w = ctx.real(w);
    let qmax = idx.q_max();
    let d = idx.d();
    let xi = -(Float::with_val(b, &u + 1u32)) / Float::with_val(b, &w * 2u32);
    let geg = gegenbauer_homogeneous(idx.l2 + 1, d + qmax, &xi, &ctx.one(), ctx);
    let winv = Float::with_val(b, w.recip_ref());
    let mut acc = Float::new(b);
    let mut wq = ctx.one();
    for q in 0..=qmax {
        let cq = eval_poly_rational(&c_q_coefficients(idx, q)?, &u, b);
        acc += Float::with_val(b, &cq * &geg[(d + q) as usize]) * &wq;
        wq *= &winv;
    }
    let value = acc * Float::with_val(b, (&u).pow(idx.l + 1))
        / Float::with_val(b, (&w).pow(idx.l + idx.l2 + idx.l3 + 3));
    Ok(PValue { index: idx, u, w, value, backend: Backend::Gegenbauer })
}

/// Relative difference |a − b| / max(|a|, |b|, 1e-30).
pub fn rel_diff(a: &Real, b: &Real) -> Real {
    let p = a.prec().max(b.prec());
    let d = Float::with_val(p, a - b).abs();
    let floor = Float::with_val(p, 1e-30);
    let s = Float::with_val(p, a.abs_ref()).max(&Float::with_val(p, b.abs_ref())).max(&floor);
    d / s
}

/// Both backends; on disagreement beyond 2^-(bits/2) the pair is recomputed at
/// doubled precision (up to twice). Returns the series value.
pub fn p_auto(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<PValue> {
    let mut c = *ctx;
    for _ in 0..3 {
        let a = p_series(idx, u, w, &c)?;
        let g = p_gegenbauer(idx, u, w, &c)?;
        if rel_diff(&a.value, &g.value) <= ctx.tol_half() {
            let value = ctx.real(&a.value);
            return Ok(PValue { index: idx, u: ctx.real(u), w: ctx.real(w), value, backend: Backend::Series });
        }
        c = c.doubled();
    }
    Err(Error::NoConvergence(format!("series and Gegenbauer backends disagree for {idx}")))
}

/// Signature shared by the general-purpose P backends.
pub type PEvaluator = fn(PIndex, &Real, &Real, &PrecisionContext) -> Result<PValue>;

pub fn p_with_backend(idx: PIndex, u: &Real, w: &Real, backend: Backend, ctx: &PrecisionContext) -> Result<PValue> {
    match backend {
        Backend::Series => p_series(idx, u, w, ctx),
        Backend::Gegenbauer => p_gegenbauer(idx, u, w, ctx),
        _ => Err(Error::InvalidArgument(format!("backend {} is not a general backend", backend.name()))),
    }
}

/// Closed form for the 1s initial state: P^(l3)_{0,0;n3,l3}(u, w).
///
/// Written homogeneously in (v, w) so that v = 0 needs no special case:
/// H_j = (vw)^j C^{l3+1}_j(X/(vw)) with X = w² − (u+1)/2, v² = w² − u.
pub fn p_1s(n3: u32, l3: u32, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<PValue> {
    let idx = PIndex::new(0, 0, n3, l3, l3)?;
    check_uw(u, w)?;
    let b = ctx.bits;
    let u = ctx.real(u);
    let w = ctx.real(w);
    let w2 = Float::with_val(b, w.square_ref());
    let x = Float::with_val(b, &w2 - Float::with_val(b, &u + 1u32) / 2u32);
    let v2 = Float::with_val(b, &w2 - &u);
    let r2 = Float::with_val(b, &v2 * &w2);
    let nn = n3 - l3;
    let h = gegenbauer_homogeneous(l3 + 1, nn, &x, &r2, ctx);
    let w2n = Float::with_val(b, (&w).pow(2 * nn));
    let mut bracket = Float::with_val(b, &w2 - &x) / &w * &h[nn as usize] / &w2n * -(2 * (n3 as i64 + 1));
    if nn >= 1 {
        let t = Float::with_val(b, &u * &h[nn as usize - 1]) * &w / &w2n * (n3 + l3 + 1);
        bracket += t;
    }
    let pref = Rational::from((factorial_exact(nn), factorial_exact(n3 + l3 + 1)));
    let value = bracket * pref * &u / Float::with_val(b, (&w).pow(2 * l3 + 3));
    Ok(PValue { index: idx, u, w, value, backend: Backend::Closed1s })
}

fn poch(a: i64, j: u32) -> Integer {
    let mut r = Integer::from(1);
    for i in 0..j as i64 {
        r *= a + i;
    }
    r
}

/// Coefficients (a)_j (b)_j / ((c)_j j!) of a terminating 2F1 with integer
/// parameters, up to the first vanishing numerator.
fn hyp2f1_int_coeffs(a: i64, bb: i64, c: i64) -> Vec<Rational> {
    let mut out = vec![Rational::from(1)];
    let mut j = 0u32;
    loop {
        let next = Rational::from((poch(a, j + 1) * poch(bb, j + 1), poch(c, j + 1) * factorial_exact(j + 1)));
        if next == 0 {
            break;
        }
        out.push(next);
        j += 1;
    }
    out
}

fn int_pow(x: &Real, e: i64, bits: u32) -> Real {
    Float::with_val(bits, x.pow(e as i32))
}

/// Dipole-limit closed form P^(0)_{n,l;n3,l}(u) at w = (u+1)/2.
///
/// Expanded in e = (u−1)/2 so that u = 1 is a regular point.
pub fn p_dipole0(n: u32, l: u32, n3: u32, u: &Real, ctx: &PrecisionContext) -> Result<PValue> {
    let idx = PIndex::new(n, l, n3, l, 0)?;
    let b = ctx.bits;
    let u = ctx.real(u);
    let w = Float::with_val(b, &u + 1u32) / 2u32;
    check_uw(&u, &w)?;
    let e = Float::with_val(b, &u - 1u32) / 2u32;
    let (n_, l_, n3_) = (n as i64, l as i64, n3 as i64);
    let bcoef = Float::with_val(b, &e * (-2 * (n_ + 1))) + (n3_ - n_);
    let mut acc = Float::new(b);
    for (j, a) in hyp2f1_int_coeffs(l_ - n_, l_ - n3_, 2 * l_ + 2).iter().enumerate() {
        let j = j as i64;
        let ej = n_ + n3_ - 2 * l_ - 1 - 2 * j;
        let tail = if ej == -1 {
            ctx.int(-2 * (n_ + 1))
        } else {
            int_pow(&e, ej, b) * &bcoef
        };
        let mut t = tail * int_pow(&u, l_ - n_ + j, b) * a;
        if (l_ - n_ + j).rem_euclid(2) == 1 {
            t = -t;
        }
        acc += t;
    }
    let value = acc * int_pow(&u, n_ + 1, b) / factorial_exact(2 * l + 1) / int_pow(&w, n_ + n3_ + 3, b);
    Ok(PValue { index: idx, u, w, value, backend: Backend::ClosedDipole })
}

fn dipole1_a(n3: i64, l: i64, k: usize) -> i64 {
    match k {
        0 => (n3 + l + 1) * (n3 + l + 2),
        1 => 2 * (n3 + l + 1) * (n3 - l + 1),
        _ => (n3 - l + 1) * (n3 - l),
    }
}

/// Dipole-limit closed form P^(1)_{n,l;n3,l−1}(u) at w = (u+1)/2, written as
/// a polynomial-over-(1+u) expansion that is regular at u = 1.
pub fn p_dipole1(n: u32, l: u32, n3: u32, u: &Real, ctx: &PrecisionContext) -> Result<PValue> {
    if l == 0 {
        return Err(Error::IndexViolation("dipole coefficient needs l >= 1".into()));
    }
    let idx = PIndex::new(n, l, n3, l - 1, 1)?;
    let b = ctx.bits;
    let u = ctx.real(u);
    let w = Float::with_val(b, &u + 1u32) / 2u32;
    check_uw(&u, &w)?;
    let (n_, l_, n3_) = (n as i64, l as i64, n3 as i64);
    let one_m_u = Float::with_val(b, 1u32 - &u);
    let one_p_u = Float::with_val(b, &u + 1u32);
    let m4u = Float::with_val(b, &u * -4i32);
    let mut total = Float::new(b);
    for k in 0..3usize {
        let ak = dipole1_a(n3_, l_, k);
        if ak == 0 {
            continue;
        }
        let lk = Float::with_val(b, &u * (n_ + 1)) - (n3_ + 2 - k as i64);
        let mut inner = Float::new(b);
        for (j, bc) in hyp2f1_int_coeffs(l_ - n_, l_ - 1 - n3_ + k as i64, 2 * l_ + 2).iter().enumerate() {
            let j = j as i64;
            let ej = n_ + n3_ - k as i64 - 2 * l_ - 2 * j;
            let tail = if ej == -1 { ctx.int(-(n_ + 1)) } else { int_pow(&one_m_u, ej, b) * &lk };
            inner += tail * int_pow(&m4u, j, b) * bc;
        }
        total += inner * ak / int_pow(&one_p_u, n_ + n3_ + 4 - k as i64, b);
    }
    let mut value = total * int_pow(&m4u, l_ + 1, b) * 2u32 / 3u32 / factorial_exact(2 * l + 1);
    if n3 % 2 == 1 {
        value = -value;
    }
    Ok(PValue { index: idx, u, w, value, backend: Backend::ClosedDipole })
}

/// The dipole bracket coefficient f_k (k = 0, 1, 2) in its literal form
/// ((1−u)/(1+u))^{2−k} ((n+1)u − n3 − 2 + k)/(1+u)² · 2F1(l−n, l−1−n3+k; 2l+2; −4u/(1−u)²).
/// Singular at u = 1.
pub fn dipole1_f(k: u32, n: u32, l: u32, n3: u32, u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if k > 2 {
        return Err(Error::InvalidArgument(format!("f_k defined for k = 0, 1, 2 (got {k})")));
    }
    if l == 0 {
        return Err(Error::IndexViolation("dipole coefficient needs l >= 1".into()));
    }
    PIndex::new(n, l, n3, l - 1, 1)?;
    let b = ctx.bits;
    let u = ctx.real(u);
    if u == 1 {
        return Err(Error::DegenerateU);
    }
    let one_m_u = Float::with_val(b, 1u32 - &u);
    let one_p_u = Float::with_val(b, &u + 1u32);
    let z = Float::with_val(b, &u * -4i32) / Float::with_val(b, one_m_u.square_ref());
    let (n_, l_, n3_) = (n as i64, l as i64, n3 as i64);
    let mut f = Float::new(b);
    let mut zj = ctx.one();
    for c in hyp2f1_int_coeffs(l_ - n_, l_ - 1 - n3_ + k as i64, 2 * l_ + 2) {
        f += Float::with_val(b, &zj * &c);
        zj *= &z;
    }
    let zeta = Float::with_val(b, &one_m_u / &one_p_u);
    let lk = Float::with_val(b, &u * (n_ + 1)) - (n3_ + 2 - k as i64);
    Ok(int_pow(&zeta, 2 - k as i64, b) * lk / Float::with_val(b, one_p_u.square_ref()) * f)
}

/// Swap symmetry: P(idx; u, w) = multiplier · P(swapped; 1/u, w/u) with
/// multiplier u^{−(l2+1)}.
pub fn p_symmetry_map(idx: PIndex, u: &Real, w: &Real, ctx: &PrecisionContext) -> Result<(PIndex, Real, Real, Real)> {
    idx.validate()?;
    check_uw(u, w)?;
    let b = ctx.bits;
    let ui = Float::with_val(b, u.recip_ref());
    let wi = Float::with_val(b, w / u);
    let mult = Float::with_val(b, (&ui).pow(idx.l2 + 1));
    Ok((idx.swapped(), ui, wi, mult))
}
