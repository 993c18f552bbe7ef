//! Local invariants of `B` from root numbers and `eta_K`, the parity and
//! Heegner checks, and the symbolic sign bookkeeping for `c(P)`.

use alloc::vec::Vec;

use crate::ecurve::{EllipticCurveF, Reduction};
use crate::nfield::{FieldError, IdealF, Place, QuadExtension, RealPlace, Splitting};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceRecord {
    pub place: Place,
    /// `eta_{K,v}(-1)`.
    pub eta: i32,
    /// `epsilon(pi_v, 1/2)`, the local root number of `E`.
    pub eps: i32,
    /// `epsilon(pi_v x chi_v, 1/2)` for trivial `chi`, the root number of `E/K` at `v`.
    pub eps_k: i32,
    pub inv_b: i32,
    pub splitting: Splitting,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignProfile {
    pub records: Vec<PlaceRecord>,
    pub ram_set: Vec<Place>,
    pub global_eps: i32,
    pub r: usize,
}

impl SignProfile {
    pub fn record(&self, place: &Place) -> Option<&PlaceRecord> {
        self.records.iter().find(|r| &r.place == place)
    }

    /// Conductor primes inert in `K`, the finite part of `Ram(B)`.
    pub fn n_minus(&self) -> Vec<IdealF> {
        self.ram_set
            .iter()
            .filter_map(|p| match p {
                Place::Finite(q) => Some(q.clone()),
                Place::Real(_) => None,
            })
            .collect()
    }
}

/// `epsilon(pi_v x 1_K, 1/2) = epsilon_v(E) epsilon_v(E^delta)` at a finite `v`.
fn rankin_selberg_sign(curve: &EllipticCurveF, prime: &IdealF, splitting: Splitting, eta: i32) -> i32 {
    match (curve.reduction_at(prime), splitting) {
        (Reduction::Good, Splitting::Ramified) => eta,
        (Reduction::Good, _) => 1,
        (Reduction::Mult(_), Splitting::Split) => 1,
        (Reduction::Mult(_), Splitting::Inert) => -1,
        // the twist is additive here; Heegner pairs never reach this arm
        (Reduction::Mult(_), Splitting::Ramified) => eta,
    }
}

/// Places where `eta_K` or `E` can be nontrivial: both real places, the
/// conductor, and the primes ramified in `K`.
pub fn relevant_places(curve: &EllipticCurveF, ext: &QuadExtension) -> Vec<Place> {
    let f = curve.field();
    let mut v: Vec<Place> = alloc::vec![Place::Real(RealPlace::Tau1), Place::Real(RealPlace::Tau2)];
    let mut finite: Vec<IdealF> = curve.conductor().iter().map(|c| c.prime.clone()).collect();
    for (p, _) in ext.rel_disc().factor(f) {
        if !finite.contains(&p) {
            finite.push(p);
        }
    }
    finite.sort();
    v.extend(finite.into_iter().map(Place::Finite));
    v
}

pub fn place_record(curve: &EllipticCurveF, ext: &QuadExtension, place: &Place, r: usize) -> Result<PlaceRecord, FieldError> {
    let eta = ext.eta_local(place)?;
    let splitting = ext.place_splitting(place)?;
    let eps = curve.local_root_number(place);
    let (eps_k, inv_b) = match place {
        Place::Real(p) => {
            let j = match p {
                RealPlace::Tau1 => 1,
                RealPlace::Tau2 => 2,
            };
            let inv = if j <= r { 1 } else { -1 };
            (1, inv)
        }
        Place::Finite(prime) => {
            let s = rankin_selberg_sign(curve, prime, splitting, eta);
            (s, eta * s)
        }
    };
    Ok(PlaceRecord { place: place.clone(), eta, eps, eps_k, inv_b, splitting })
}

pub fn predicted_invariants(curve: &EllipticCurveF, ext: &QuadExtension, r: usize) -> Result<SignProfile, FieldError> {
    let mut records = Vec::new();
    for place in relevant_places(curve, ext) {
        records.push(place_record(curve, ext, &place, r)?);
    }
    let ram_set = records.iter().filter(|r| r.inv_b < 0).map(|r| r.place.clone()).collect();
    Ok(SignProfile { records, ram_set, global_eps: curve.global_root_number(), r })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityDiagnostic {
    pub ram_even: bool,
    /// `-prod_v eta_v(-1) inv_v`.
    pub product: i32,
    /// `prod_v eta_v(-1)`, which reciprocity forces to be `+1`.
    pub eta_product: i32,
}

impl ParityDiagnostic {
    pub fn ok(&self) -> bool {
        self.ram_even && self.product == -1
    }
}

pub fn parity_check(profile: &SignProfile) -> ParityDiagnostic {
    let eta_product: i32 = profile.records.iter().map(|r| r.eta).product();
    let inv_product: i32 = profile.records.iter().map(|r| r.inv_b).product();
    ParityDiagnostic { ram_even: profile.ram_set.len() % 2 == 0, product: -eta_product * inv_product, eta_product }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeegnerFailure {
    PlusNotSplit(u64),
    MinusNotInert(u64),
    DiscriminantNotCoprime(u64),
}

/// Every prime of `N+` splits in `K`, every prime of `N-` is inert, and
/// `d_{K/F}` is prime to `N`.
pub fn heegner_check(ext: &QuadExtension, n_plus: &[IdealF], n_minus: &[IdealF]) -> Result<Result<(), HeegnerFailure>, FieldError> {
    let f = ext.base();
    for p in n_plus.iter().chain(n_minus) {
        if ext.rel_disc().is_coprime(f, p) {
            continue;
        }
        return Ok(Err(HeegnerFailure::DiscriminantNotCoprime(p.norm())));
    }
    for p in n_plus {
        if ext.place_splitting(&Place::Finite(p.clone()))? != Splitting::Split {
            return Ok(Err(HeegnerFailure::PlusNotSplit(p.norm())));
        }
    }
    for p in n_minus {
        if ext.place_splitting(&Place::Finite(p.clone()))? != Splitting::Inert {
            return Ok(Err(HeegnerFailure::MinusNotInert(p.norm())));
        }
    }
    Ok(Ok(()))
}

/// `(N+, N-)` read off a profile: conductor primes with `inv_B = +1` and `-1`.
pub fn conductor_split(curve: &EllipticCurveF, profile: &SignProfile) -> (Vec<IdealF>, Vec<IdealF>) {
    let minus = profile.n_minus();
    let plus = curve.conductor().iter().map(|c| c.prime.clone()).filter(|p| !minus.contains(p)).collect();
    (plus, minus)
}

/// Predicted eigenvalue of complex conjugation on the traced point: `-epsilon`.
pub fn galois_conjugation_sign(global_eps: i32) -> i32 {
    -global_eps
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConductorSide {
    Minus,
    Plus,
    Away,
}

/// Effect of the Atkin-Lehner element `j_v` on `P_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transport {
    Scalar(i32),
    /// `eps_v rec_K(k_v^-1)`: a sign composed with a Galois twist.
    ScalarGalois(i32),
    Identity,
}

impl Transport {
    pub fn sign(self) -> i32 {
        match self {
            Transport::Scalar(s) | Transport::ScalarGalois(s) => s,
            Transport::Identity => 1,
        }
    }
}

pub fn atkin_lehner_transport(side: ConductorSide, eps_v: i32) -> Transport {
    match side {
        ConductorSide::Minus => Transport::Scalar(-eps_v),
        ConductorSide::Plus => Transport::ScalarGalois(eps_v),
        ConductorSide::Away => Transport::Identity,
    }
}

/// `(-1)^(r-1) prod_v sign(transport_v)`, the sign picked up by `P` under
/// complex conjugation after the orientation flip.
pub fn compose_transports(r: usize, transports: &[Transport]) -> i32 {
    let orient = if r % 2 == 1 { 1 } else { -1 };
    transports.iter().fold(orient, |acc, t| acc * t.sign())
}

/// `prod_{v | N} (1 + inv_v eps_v)`.
pub fn multiplicity_factor(profile: &SignProfile, conductor: &[IdealF]) -> u64 {
    let mut m = 1u64;
    for p in conductor {
        let rec = profile.record(&Place::Finite(p.clone())).expect("conductor place in profile");
        m *= (1 + rec.inv_b * rec.eps) as u64;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transport_signs() {
        assert_eq!(atkin_lehner_transport(ConductorSide::Minus, 1), Transport::Scalar(-1));
        assert_eq!(atkin_lehner_transport(ConductorSide::Away, -1), Transport::Identity);
        assert_eq!(atkin_lehner_transport(ConductorSide::Plus, -1).sign(), -1);
        assert_eq!(galois_conjugation_sign(-1), 1);
        assert_eq!(galois_conjugation_sign(1), -1);
    }

    #[test]
    fn odd_ram_set_fails_parity() {
        let rec = |place, eta, inv_b| PlaceRecord { place, eta, eps: 1, eps_k: 1, inv_b, splitting: Splitting::Split };
        let profile = SignProfile {
            records: alloc::vec![rec(Place::Real(RealPlace::Tau1), -1, -1), rec(Place::Real(RealPlace::Tau2), 1, 1)],
            ram_set: alloc::vec![Place::Real(RealPlace::Tau1)],
            global_eps: 1,
            r: 2,
        };
        assert!(!parity_check(&profile).ok());
    }
}
