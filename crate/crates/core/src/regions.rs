//! Closed-form parameter regions: when the indicator `X` of the unit cube
//! belongs to `B^{s,tau}_{p,q}`, and when `f -> <f, X>` extends to a bounded
//! functional on it.
//!
//! Conventions: `1/inf = 0`; thresholds are compared with a relative
//! tolerance of `1e-12` so that decimal inputs such as `s = 0.1` land on the
//! boundary they denote.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::seqnorm::BesovParams;
use crate::{approx_eq, approx_le, approx_lt};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub member: bool,
    pub active_condition: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Extension {
    Extends,
    DoesNotExtend,
    Open,
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Extension::Extends => "Extends",
            Extension::DoesNotExtend => "DoesNotExtend",
            Extension::Open => "Open",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalVerdict {
    pub value: Extension,
    pub active_condition: String,
}

fn verdict(member: bool, label: &str) -> MembershipVerdict {
    MembershipVerdict {
        member,
        active_condition: label.to_string(),
    }
}

fn functional(value: Extension, label: &str) -> FunctionalVerdict {
    FunctionalVerdict {
        value,
        active_condition: label.to_string(),
    }
}

/// `n(1/p - tau)`: above it the Morrey prefactor makes `X` too rough.
pub fn morrey_threshold(params: &BesovParams) -> f64 {
    params.n as f64 * (params.inv_p() - params.tau)
}

/// `(n-1)/(np)`.
pub fn tau_split(params: &BesovParams) -> f64 {
    (params.n as f64 - 1.0) / params.n as f64 * params.inv_p()
}

/// `(1 - tau p) n (1/p - 1)`, the critical smoothness for `p < 1`.
pub fn subunit_threshold(params: &BesovParams) -> f64 {
    (1.0 - params.tau * params.p) * params.n as f64 * (params.inv_p() - 1.0)
}

/// Whether `X ∈ B^{s,tau}_{p,q}`.
pub fn chi_membership(params: &BesovParams) -> MembershipVerdict {
    let inv_p = params.inv_p();
    let within_morrey = approx_le(params.s, morrey_threshold(params));
    if params.tau > inv_p && !approx_eq(params.tau, inv_p) {
        return if within_morrey {
            verdict(true, "tau>1/p: s<=n(1/p-tau)")
        } else {
            verdict(false, "tau>1/p: s>n(1/p-tau)")
        };
    }
    let boundary = approx_eq(params.s, inv_p);
    let below = approx_lt(params.s, inv_p);
    if boundary && params.q.is_infinite() {
        if within_morrey {
            verdict(true, "s=1/p,q=inf,s<=n(1/p-tau)")
        } else {
            verdict(false, "s=1/p,q=inf but s>n(1/p-tau)")
        }
    } else if below {
        if within_morrey {
            verdict(true, "s<1/p,s<=n(1/p-tau)")
        } else {
            verdict(false, "s<1/p but s>n(1/p-tau)")
        }
    } else if boundary {
        verdict(false, "s=1/p with q<inf")
    } else {
        verdict(false, "s>1/p")
    }
}

/// Membership of any single Haar function; the same region as [`chi_membership`].
pub fn haar_element_membership(params: &BesovParams) -> MembershipVerdict {
    chi_membership(params)
}

/// Classical (`tau = 0`) membership: `s = 1/p, q = inf` or `s < 1/p`.
pub fn classical_membership(params: &BesovParams) -> bool {
    let inv_p = params.inv_p();
    (approx_eq(params.s, inv_p) && params.q.is_infinite()) || approx_lt(params.s, inv_p)
}

/// Whether `f -> <f, X>` extends continuously to `B^{s,tau}_{p,q}`.
pub fn functional_verdict(params: &BesovParams) -> FunctionalVerdict {
    let n = params.n as f64;
    let inv_p = params.inv_p();
    let split = tau_split(params);
    let s = params.s;
    let q = params.q;

    if !approx_le(params.tau, split) {
        let thr = n * inv_p - n * params.tau - 1.0;
        return if approx_lt(thr, s) {
            functional(Extension::Extends, "tau>(n-1)/(np): s>n/p-n*tau-1")
        } else {
            functional(Extension::DoesNotExtend, "tau>(n-1)/(np): s<=n/p-n*tau-1")
        };
    }

    if params.p >= 1.0 {
        let thr = inv_p - 1.0;
        return if approx_eq(s, thr) {
            if q <= 1.0 {
                functional(Extension::Extends, "p>=1: s=1/p-1,q<=1")
            } else {
                functional(Extension::DoesNotExtend, "p>=1: s=1/p-1,q>1")
            }
        } else if s > thr {
            functional(Extension::Extends, "p>=1: s>1/p-1")
        } else {
            functional(Extension::DoesNotExtend, "p>=1: s<1/p-1")
        };
    }

    let thr = subunit_threshold(params);
    if approx_eq(s, thr) {
        if params.tau == 0.0 {
            if q <= 1.0 {
                functional(Extension::Extends, "p<1,tau=0: s=n(1/p-1),q<=1")
            } else {
                functional(Extension::DoesNotExtend, "p<1,tau=0: s=n(1/p-1),q>1")
            }
        } else if q <= params.p {
            functional(Extension::Extends, "p<1: s=(1-tau*p)n(1/p-1),q<=p")
        } else if q > 1.0 {
            functional(Extension::DoesNotExtend, "p<1: s=(1-tau*p)n(1/p-1),q>1")
        } else {
            functional(Extension::Open, "p<1: s=(1-tau*p)n(1/p-1),p<q<=1")
        }
    } else if s > thr {
        functional(Extension::Extends, "p<1: s>(1-tau*p)n(1/p-1)")
    } else {
        functional(Extension::DoesNotExtend, "p<1: s<(1-tau*p)n(1/p-1)")
    }
}

/// Classical (`tau = 0`) extension region: `s = t, q <= 1` or `s > t`, with
/// `t = 1/p - 1` for `p >= 1` and `t = n(1/p - 1)` for `p < 1`.
pub fn classical_extends(params: &BesovParams) -> bool {
    let inv_p = params.inv_p();
    let thr = if params.p >= 1.0 {
        inv_p - 1.0
    } else {
        params.n as f64 * (inv_p - 1.0)
    };
    (approx_eq(params.s, thr) && params.q <= 1.0) || approx_lt(thr, params.s)
}

/// `s + n(tau - 1/p) > 0`: embedding into bounded uniformly continuous functions.
pub fn cub_embedding(params: &BesovParams) -> bool {
    let v = params.s + params.n as f64 * (params.tau - params.inv_p());
    v > 0.0 && !approx_eq(v, 0.0)
}

/// Smallest `N_1` with `N_1 + 1 > max{n + n/p - n tau - s, 2 sigma_p + 2n + n tau + 1,
/// n(1 + 1/p + 1/2), n + s, n/p - s}`.
pub fn min_generator_regularity(params: &BesovParams) -> i64 {
    let n = params.n as f64;
    let inv_p = params.inv_p();
    let s = params.s;
    let tau = params.tau;
    let m = [
        n + n * inv_p - n * tau - s,
        2.0 * params.sigma_p() + 2.0 * n + n * tau + 1.0,
        n * (1.0 + inv_p + 0.5),
        n + s,
        n * inv_p - s,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    // An integer bound M gives N_1 = M; snap near-integers first.
    let r = m.round();
    let floor = if approx_eq(m, r) { r } else { m.floor() };
    floor.max(0.0) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn bp(s: f64, p: f64, q: f64, tau: f64, n: usize) -> BesovParams {
        BesovParams::new(s, p, q, tau, n).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(chi_membership(&bp(0.5, 2.0, INF, 0.0, 1)).member);
        assert!(!chi_membership(&bp(0.5, 2.0, 2.0, 0.0, 1)).member);
        assert!(chi_membership(&bp(-1.0, 1.0, 1.0, 2.0, 1)).member);
        assert!(chi_membership(&bp(0.0, INF, INF, 0.0, 3)).member);
        assert!(!chi_membership(&bp(-0.9, 1.0, 1.0, 2.0, 1)).member);
    }

    #[test]
    fn haar_membership_identity() {
        for t in [
            bp(0.5, 2.0, INF, 0.0, 1),
            bp(0.5, 2.0, 2.0, 0.0, 1),
            bp(-1.0, 1.0, 1.0, 2.0, 1),
        ] {
            assert_eq!(haar_element_membership(&t), chi_membership(&t));
        }
    }

    #[test]
    fn morrey_cap_in_lower_regime() {
        // tau = 1/p exactly stays in the lower regime: s < 1/p but s must
        // also satisfy s <= n(1/p - tau) = 0.
        let v = chi_membership(&bp(0.25, 2.0, 1.0, 0.5, 2));
        assert!(!v.member);
        assert!(chi_membership(&bp(0.0, 2.0, 1.0, 0.5, 2)).member);
    }

    #[test]
    fn functional_examples() {
        for n in 1..=3 {
            assert_eq!(functional_verdict(&bp(0.0, 1.0, 0.5, 0.0, n)).value, Extension::Extends);
            let nf = n as f64;
            assert_eq!(
                functional_verdict(&bp(nf, 0.5, 2.0, 0.0, n)).value,
                Extension::DoesNotExtend
            );
        }
        assert_eq!(functional_verdict(&bp(1.5, 0.5, 0.8, 0.5, 2)).value, Extension::Open);
        assert_eq!(functional_verdict(&bp(1.5, 0.5, 0.5, 0.5, 2)).value, Extension::Extends);
        assert_eq!(
            functional_verdict(&bp(1.5, 0.5, 1.5, 0.5, 2)).value,
            Extension::DoesNotExtend
        );
    }

    #[test]
    fn functional_upper_regime() {
        // n=2, p=2, tau=1 > 1/4: threshold n/p - n tau - 1 = -2.
        assert_eq!(
            functional_verdict(&bp(-2.0, 2.0, 1.0, 1.0, 2)).value,
            Extension::DoesNotExtend
        );
        assert_eq!(
            functional_verdict(&bp(-1.9, 2.0, 1.0, 1.0, 2)).value,
            Extension::Extends
        );
        // p = inf with tau > 0 is always in the upper regime.
        assert_eq!(
            functional_verdict(&bp(-1.4, INF, 2.0, 0.25, 2)).value,
            Extension::Extends
        );
        assert_eq!(
            functional_verdict(&bp(-1.4, INF, 2.0, 0.25, 2)).active_condition,
            "tau>(n-1)/(np): s>n/p-n*tau-1"
        );
    }

    #[test]
    fn decimal_thresholds() {
        // 1/p - 1 with p = 1/0.9 is not exactly representable.
        let p = 1.0 / 0.9;
        let s = 0.9 - 1.0;
        assert_eq!(functional_verdict(&bp(s, p, 1.0, 0.0, 1)).value, Extension::Extends);
        assert_eq!(
            functional_verdict(&bp(s, p, 2.0, 0.0, 1)).value,
            Extension::DoesNotExtend
        );
    }

    #[test]
    fn embedding_examples() {
        assert!(!cub_embedding(&bp(1.0, 1.0, 1.0, 0.0, 1)));
        assert!(cub_embedding(&bp(2.0, 1.0, 1.0, 0.0, 1)));
        assert!(cub_embedding(&bp(0.0, 2.0, 1.0, 1.0, 2)));
    }

    #[test]
    fn regularity_examples() {
        assert_eq!(min_generator_regularity(&bp(0.0, 2.0, 2.0, 0.0, 1)), 3);
        assert_eq!(min_generator_regularity(&bp(0.0, INF, 2.0, 0.0, 1)), 3);
        assert_eq!(min_generator_regularity(&bp(0.0, 2.0, 2.0, 0.1, 1)), 3);
        // max term 2*2 + 4 + 0 + 1 = 9 for n = 2, p = 0.5.
        assert_eq!(min_generator_regularity(&bp(0.0, 0.5, 1.0, 0.0, 2)), 9);
    }
}
