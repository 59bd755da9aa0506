//! Closed-form rates and the FTP-versus-traditional crossover.
//!
//! Every quantity is an exact rational. Rates of both families have the shape
//! `(slope · λ + intercept)^{-1}` with `λ = b(1/a + 1/c)`, which [`RateForm`]
//! captures; comparing two schemes is then a linear inequality in `λ`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::fields::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("crossover hypotheses fail: {0:?}")]
    HypothesesFail(Lemma4Report),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// FTP parameters together with the matrix shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateParams {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub l: u64,
    pub t: u64,
    pub primes: Vec<u64>,
}

impl RateParams {
    pub fn new(a: u64, b: u64, c: u64, l: u64, t: u64, primes: &[u64]) -> Self {
        Self { a, b, c, l, t, primes: primes.to_vec() }
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        if self.a == 0 || self.b == 0 || self.c == 0 {
            return Err(AnalysisError::InvalidParams("matrix dimensions must be positive"));
        }
        validate_code(self.l, self.t, &self.primes)?;
        if !self.b.is_multiple_of(self.l) {
            return Err(AnalysisError::InvalidParams("L must divide b"));
        }
        Ok(())
    }

    /// `N_i = p_i + 2L + 2T − 2`.
    pub fn group_sizes(&self) -> Vec<u64> {
        group_sizes(self.l, self.t, &self.primes)
    }

    /// `λ = b(1/a + 1/c)`.
    pub fn lambda(&self) -> BigRational {
        aspect(self.a, self.b, self.c)
    }
}

/// `λ = b(1/a + 1/c)`.
pub fn aspect(a: u64, b: u64, c: u64) -> BigRational {
    int(b) * (rat(1, a as i64) + rat(1, c as i64))
}

fn validate_code(l: u64, t: u64, primes: &[u64]) -> Result<(), AnalysisError> {
    if l == 0 || t == 0 {
        return Err(AnalysisError::InvalidParams("L and T must be positive"));
    }
    if primes.len() as u64 != l || primes.windows(2).any(|w| w[0] >= w[1]) || primes.iter().any(|&p| !is_prime(p)) {
        return Err(AnalysisError::InvalidParams("need L distinct ascending primes"));
    }
    Ok(())
}

pub fn group_sizes(l: u64, t: u64, primes: &[u64]) -> Vec<u64> {
    primes.iter().map(|p| p + 2 * l + 2 * t - 2).collect()
}

/// `Σ_i N_i / p_i`: download symbols per output symbol.
pub fn download_ratio(l: u64, t: u64, primes: &[u64]) -> Result<BigRational, AnalysisError> {
    validate_code(l, t, primes)?;
    Ok(group_sizes(l, t, primes)
        .iter()
        .zip(primes)
        .fold(BigRational::zero(), |acc, (n, p)| acc + rat(*n as i64, *p as i64)))
}

/// A rate of the form `(slope · λ + intercept)^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateForm {
    pub slope: BigRational,
    pub intercept: BigRational,
}

impl RateForm {
    /// FTP: slope `N_L / L`, intercept `Σ N_i / p_i`.
    pub fn ftp(l: u64, t: u64, primes: &[u64]) -> Result<Self, AnalysisError> {
        let intercept = download_ratio(l, t, primes)?;
        let n_l = *group_sizes(l, t, primes).last().unwrap();
        Ok(Self { slope: rat(n_l as i64, l as i64), intercept })
    }

    /// Traditional polynomial code with recovery threshold `N′` and partition `L′`:
    /// slope `N′ / L′`, intercept `N′`.
    pub fn traditional(n_prime: u64, l_prime: u64) -> Result<Self, AnalysisError> {
        if l_prime == 0 || n_prime <= l_prime {
            return Err(AnalysisError::InvalidParams("need N' > L' > 0"));
        }
        Ok(Self { slope: rat(n_prime as i64, l_prime as i64), intercept: int(n_prime) })
    }

    pub fn eval(&self, lambda: &BigRational) -> BigRational {
        (&self.slope * lambda + &self.intercept).recip()
    }

    /// The `λ` below which `self` has the strictly higher rate, if that set is a
    /// nonempty bounded interval `[0, threshold)`.
    pub fn crossover(&self, other: &Self) -> Option<BigRational> {
        let ds = &self.slope - &other.slope;
        let di = &other.intercept - &self.intercept;
        (ds.is_positive() && di.is_positive()).then(|| di / ds)
    }
}

/// `R = (N_L b/L (1/a + 1/c) + Σ N_i/p_i)^{-1}`.
pub fn ftp_rate(params: &RateParams) -> Result<BigRational, AnalysisError> {
    params.validate()?;
    let n_l = *params.group_sizes().last().unwrap();
    let denom = int(n_l) * int(params.b) / int(params.l) * (rat(1, params.a as i64) + rat(1, params.c as i64))
        + download_ratio(params.l, params.t, &params.primes)?;
    Ok(denom.recip())
}

/// `(U, D, S)` in `F_{q0}` symbols.
pub fn costs(params: &RateParams) -> Result<(u128, u128, u128), AnalysisError> {
    params.validate()?;
    let (a, b, c, l) = (params.a as u128, params.b as u128, params.c as u128, params.l as u128);
    let prod: u128 = params.primes.iter().map(|&p| p as u128).product();
    let sizes = params.group_sizes();
    let n_l = *sizes.last().unwrap() as u128;
    let upload = n_l * (a * b / l + b * c / l) * prod;
    let download =
        a * c * sizes.iter().zip(&params.primes).map(|(&n, &p)| n as u128 * (prod / p as u128)).sum::<u128>();
    Ok((upload, download, a * c * prod))
}

/// `(N′(b/L (1/a + 1/c) + 1))^{-1}`, requiring `N′ > L`.
pub fn traditional_bound(n_prime: u64, l: u64, a: u64, b: u64, c: u64) -> Result<BigRational, AnalysisError> {
    if a == 0 || b == 0 || c == 0 {
        return Err(AnalysisError::InvalidParams("matrix dimensions must be positive"));
    }
    Ok(RateForm::traditional(n_prime, l)?.eval(&aspect(a, b, c)))
}

/// The published rate `(7((ab + bc)/(3ac) + 1))^{-1}` of the `L = 3, T = 2`
/// comparison scheme.
pub fn mital_rate(a: u64, b: u64, c: u64) -> BigRational {
    let (a, b, c) = (int(a), int(b), int(c));
    let inner = (&a * &b + &b * &c) / (int(3) * &a * &c) + BigRational::one();
    (int(7) * inner).recip()
}

/// Inputs of the comparison lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma4Input {
    pub t: u64,
    pub n_prime: u64,
    pub l_prime: u64,
    pub l: u64,
    pub lambda: BigRational,
    pub eta: BigRational,
    pub primes: Vec<u64>,
}

/// Per-hypothesis verdicts; `claim` is present only when all hypotheses hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma4Report {
    /// Positive integers, `λ, η ≥ 0`, `L` ascending primes.
    pub well_formed: bool,
    /// `p_i ≥ 2L(L+T−1)η` for all `i`.
    pub primes_large: bool,
    /// `p_L > L N′/L′ − 2L − 2T + 2`.
    pub last_prime_bound: bool,
    /// `λ < (N′ − L − 1/η) / (N_L/L − N′/L′)`.
    pub lambda_bound: bool,
    /// `(N_L λ/L + Σ N_i/p_i)^{-1} > (N′(λ/L′ + 1))^{-1}`.
    pub claim: Option<bool>,
}

impl Lemma4Report {
    pub fn hypotheses_ok(&self) -> bool {
        self.well_formed && self.primes_large && self.last_prime_bound && self.lambda_bound
    }
}

/// `(N′ − L − 1/η) / (N_L/L − N′/L′)`; `None` when `η = 0` or the denominator is not positive.
fn lambda_limit(input: &Lemma4Input, n_l: u64) -> Option<BigRational> {
    if input.eta.is_zero() {
        return None;
    }
    let den = rat(n_l as i64, input.l as i64) - rat(input.n_prime as i64, input.l_prime as i64);
    if !den.is_positive() {
        return None;
    }
    Some((int(input.n_prime) - int(input.l) - input.eta.recip()) / den)
}

pub fn lemma4_check(input: &Lemma4Input) -> Lemma4Report {
    let well_formed = input.t > 0
        && input.n_prime > 0
        && input.l_prime > 0
        && !input.lambda.is_negative()
        && !input.eta.is_negative()
        && validate_code(input.l, input.t, &input.primes).is_ok();
    if !well_formed {
        return Lemma4Report {
            well_formed,
            primes_large: false,
            last_prime_bound: false,
            lambda_bound: false,
            claim: None,
        };
    }
    let (l, t) = (input.l, input.t);
    let floor = int(2 * l * (l + t - 1)) * &input.eta;
    let primes_large = input.primes.iter().all(|&p| int(p) >= floor);
    let p_l = *input.primes.last().unwrap();
    let last_prime_bound =
        int(p_l) + int(2 * l + 2 * t) - int(2) > int(l) * rat(input.n_prime as i64, input.l_prime as i64);
    let n_l = p_l + 2 * l + 2 * t - 2;
    let lambda_bound = lambda_limit(input, n_l).is_some_and(|k| input.lambda < k);
    let mut report = Lemma4Report { well_formed, primes_large, last_prime_bound, lambda_bound, claim: None };
    if report.hypotheses_ok() {
        let ftp = RateForm::ftp(l, t, &input.primes).expect("validated").eval(&input.lambda);
        let trad =
            RateForm::traditional(input.n_prime, input.l_prime).map(|f| f.eval(&input.lambda)).unwrap_or_else(|_| {
                // N′ ≤ L′ still defines the right-hand side
                (int(input.n_prime) * (&input.lambda / int(input.l_prime) + BigRational::one())).recip()
            });
        report.claim = Some(ftp > trad);
    }
    report
}

/// Outcome of choosing FTP parameters against a traditional code with `L′ = L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossoverReport {
    pub l: u64,
    pub t: u64,
    pub n_prime: u64,
    pub eta: BigRational,
    pub primes: Vec<u64>,
    pub n_l: u64,
    /// `K = (N′ − L − 1/η) / (N_L/L − N′/L)`.
    pub k: BigRational,
    /// Hypotheses checked at `λ = 0`.
    pub hypotheses: Lemma4Report,
}

/// The constant `K`: FTP beats every traditional code with threshold `N′`
/// whenever `b(1/a + 1/c) < K`.
///
/// `η` must exceed `(N′ − L)^{-1}`, otherwise `K ≤ 0` and no shape qualifies.
pub fn crossover_k(
    l: u64,
    t: u64,
    n_prime: u64,
    eta: &BigRational,
    primes: &[u64],
) -> Result<CrossoverReport, AnalysisError> {
    let input = Lemma4Input {
        t,
        n_prime,
        l_prime: l,
        l,
        lambda: BigRational::zero(),
        eta: eta.clone(),
        primes: primes.to_vec(),
    };
    let hypotheses = lemma4_check(&input);
    if !hypotheses.hypotheses_ok() {
        return Err(AnalysisError::HypothesesFail(hypotheses));
    }
    let n_l = *group_sizes(l, t, primes).last().unwrap();
    let k = lambda_limit(&input, n_l).expect("hypotheses hold");
    Ok(CrossoverReport { l, t, n_prime, eta: eta.clone(), primes: primes.to_vec(), n_l, k, hypotheses })
}

/// The smallest `L` ascending primes with `p_i ≥ 2L(L+T−1)η` and
/// `p_L > L N′/L′ − 2L − 2T + 2`.
pub fn prime_search(l: u64, t: u64, n_prime: u64, l_prime: u64, eta: &BigRational) -> Vec<u64> {
    assert!(l > 0 && l_prime > 0, "L and L' must be positive");
    let floor = (int(2 * l * (l + t - 1)) * eta).ceil().to_integer();
    let floor: u64 = u64::try_from(floor.max(BigInt::zero())).expect("bound fits in u64");
    // p_L > bound  ⇔  p_L ≥ ⌊bound⌋ + 1
    let bound = int(l) * rat(n_prime as i64, l_prime as i64) - int(2 * l + 2 * t) + int(2);
    let last_floor = bound.floor().to_integer() + BigInt::one();
    let last_floor: u64 = u64::try_from(last_floor.max(BigInt::zero())).unwrap_or(0);

    let mut primes = Vec::with_capacity(l as usize);
    let mut p = floor.max(2);
    while (primes.len() as u64) < l - 1 {
        if is_prime(p) {
            primes.push(p);
        }
        p += 1;
    }
    let mut last = p.max(last_floor);
    while !is_prime(last) {
        last += 1;
    }
    primes.push(last);
    primes
}

/// `K(η)` for each `η`, with primes chosen by [`prime_search`].
pub fn k_sweep(
    l: u64,
    t: u64,
    n_prime: u64,
    etas: &[BigRational],
) -> Vec<(BigRational, Result<CrossoverReport, AnalysisError>)> {
    etas.iter()
        .map(|eta| {
            let primes = prime_search(l, t, n_prime, l, eta);
            (eta.clone(), crossover_k(l, t, n_prime, eta, &primes))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_group_rate() {
        for (a, b, c) in [(2, 2, 2), (3, 5, 7), (1, 1, 9)] {
            let r = ftp_rate(&RateParams::new(a, b, c, 1, 1, &[2])).unwrap();
            let (a, b, c) = (a as i64, b as i64, c as i64);
            assert_eq!(r, rat(a * c, 4 * a * b + 4 * b * c + 2 * a * c));
        }
        assert_eq!(ftp_rate(&RateParams::new(2, 2, 2, 1, 1, &[2])).unwrap(), rat(1, 10));
    }

    #[test]
    fn three_group_rate() {
        assert_eq!(download_ratio(3, 2, &[5, 7, 11]).unwrap(), rat(2491, 385));
        let p = RateParams::new(2, 3, 5, 3, 2, &[5, 7, 11]);
        let want = (rat(19, 3) * int(3) * (rat(1, 2) + rat(1, 5)) + rat(2491, 385)).recip();
        assert_eq!(ftp_rate(&p).unwrap(), want);
    }

    #[test]
    fn costs_match_rate() {
        let p = RateParams::new(2, 2, 2, 1, 1, &[2]);
        assert_eq!(costs(&p).unwrap(), (64, 16, 8));
        let p = RateParams::new(4, 6, 3, 3, 2, &[5, 7, 11]);
        let (u, d, s) = costs(&p).unwrap();
        assert_eq!(BigRational::new(BigInt::from(d), BigInt::from(s)), rat(2491, 385));
        assert_eq!(BigRational::new(BigInt::from(s), BigInt::from(u + d)), ftp_rate(&p).unwrap());
    }

    #[test]
    fn invalid_params() {
        assert!(ftp_rate(&RateParams::new(2, 3, 2, 2, 1, &[2, 3])).is_err());
        assert!(ftp_rate(&RateParams::new(2, 2, 2, 2, 1, &[3, 2])).is_err());
        assert!(ftp_rate(&RateParams::new(2, 2, 2, 1, 1, &[4])).is_err());
        assert!(traditional_bound(1, 1, 2, 2, 2).is_err());
    }

    #[test]
    fn traditional_bounds() {
        let (a, b, c) = (3i64, 4i64, 5i64);
        assert_eq!(traditional_bound(3, 1, 3, 4, 5).unwrap(), rat(a * c, 3 * a * b + 3 * b * c + 3 * a * c));
        assert_eq!(traditional_bound(7, 3, 3, 6, 5).unwrap(), mital_rate(3, 6, 5));
    }

    #[test]
    fn lemma4_small_instance() {
        let input =
            Lemma4Input { t: 1, n_prime: 2, l_prime: 1, l: 1, lambda: rat(1, 20), eta: int(2), primes: vec![5] };
        let r = lemma4_check(&input);
        assert!(r.hypotheses_ok());
        assert_eq!(r.claim, Some(true));
        // (7λ + 7/5)^{-1} = 20/35 and (2(λ + 1))^{-1} = 10/21
        assert_eq!(RateForm::ftp(1, 1, &[5]).unwrap().eval(&rat(1, 20)), rat(20, 35));
        assert_eq!(RateForm::traditional(2, 1).unwrap().eval(&rat(1, 20)), rat(10, 21));
    }

    #[test]
    fn lemma4_at_zero_aspect() {
        let input = Lemma4Input {
            t: 1,
            n_prime: 2,
            l_prime: 1,
            l: 1,
            lambda: BigRational::zero(),
            eta: int(2),
            primes: vec![5],
        };
        let r = lemma4_check(&input);
        assert_eq!(r.claim, Some(download_ratio(1, 1, &[5]).unwrap() < int(2)));
    }

    #[test]
    fn lemma4_failing_last_prime() {
        let input =
            Lemma4Input { t: 1, n_prime: 9, l_prime: 1, l: 1, lambda: rat(1, 100), eta: int(1), primes: vec![5] };
        let r = lemma4_check(&input);
        assert!(r.primes_large);
        assert!(!r.last_prime_bound);
        assert_eq!(r.claim, None);
    }

    #[test]
    fn k_for_small_instance() {
        let r = crossover_k(1, 1, 2, &int(2), &[5]).unwrap();
        assert_eq!(r.k, rat(1, 10));
        assert_eq!(r.n_l, 7);
    }

    #[test]
    fn k_shrinks_towards_threshold_eta() {
        // N′ − L = 1, so η must exceed 1
        let near = crossover_k(1, 1, 2, &rat(11, 10), &[5]).unwrap().k;
        let far = crossover_k(1, 1, 2, &int(2), &[5]).unwrap().k;
        assert!(near.is_positive() && near < far);
        assert!(matches!(crossover_k(1, 1, 2, &int(1), &[5]), Err(AnalysisError::HypothesesFail(_))));
    }

    #[test]
    fn prime_search_examples() {
        assert_eq!(prime_search(1, 1, 2, 1, &int(2)), vec![5]);
        assert_eq!(prime_search(1, 1, 2, 1, &int(1)), vec![2]);
        assert_eq!(prime_search(3, 2, 7, 3, &BigRational::zero()), vec![2, 3, 5]);
        // p_L > 3·20/3 − 6 − 4 + 2 = 12
        assert_eq!(prime_search(3, 2, 20, 3, &BigRational::zero()), vec![2, 3, 13]);
    }

    #[test]
    fn crossover_forms() {
        let ftp = RateForm::ftp(1, 1, &[2]).unwrap();
        let trad = RateForm::traditional(3, 1).unwrap();
        assert_eq!(ftp.crossover(&trad), Some(int(1)));
        assert_eq!(trad.crossover(&ftp), None);
    }
}
