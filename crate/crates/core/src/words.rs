//! Freely reduced words in the free group on `x, y`, the two-bridge relator
//! word `W`, and the peripheral words of two-bridge and torus knot groups.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::UnitQuaternion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    X,
    Y,
}

impl Generator {
    pub fn swapped(self) -> Self {
        match self {
            Generator::X => Generator::Y,
            Generator::Y => Generator::X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: Generator,
    /// +1 or −1.
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: Generator, exponent: i8) -> Self {
        debug_assert!(exponent == 1 || exponent == -1);
        Self { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Self { generator: self.generator, exponent: -self.exponent }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.exponent == -other.exponent
    }
}

/// A freely reduced word. Every constructor reduces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        Self { letters: free_reduce(letters) }
    }

    pub fn generator(g: Generator) -> Self {
        Self { letters: vec![Letter::new(g, 1)] }
    }

    pub fn x() -> Self {
        Self::generator(Generator::X)
    }

    pub fn y() -> Self {
        Self::generator(Generator::Y)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenate then reduce.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        Self::from_letters(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn inverse(&self) -> GroupWord {
        Self { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn pow(&self, e: i64) -> GroupWord {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            out.extend_from_slice(&base.letters);
        }
        Self::from_letters(out)
    }

    /// `W*(x, y) = W(y, x)`.
    pub fn star(&self) -> GroupWord {
        Self::from_letters(
            self.letters.iter().map(|l| Letter::new(l.generator.swapped(), l.exponent)),
        )
    }

    /// `W(x⁻¹, y⁻¹)`: flips every exponent in place.
    pub fn invert_generators(&self) -> GroupWord {
        Self::from_letters(self.letters.iter().map(|l| l.inverse()))
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.exponent as i64).sum()
    }

    /// Left-to-right product of the generator images.
    pub fn evaluate(&self, qx: &UnitQuaternion, qy: &UnitQuaternion) -> UnitQuaternion {
        let (ix, iy) = (qx.inverse(), qy.inverse());
        self.letters.iter().fold(UnitQuaternion::IDENTITY, |acc, l| {
            let q = match (l.generator, l.exponent > 0) {
                (Generator::X, true) => qx,
                (Generator::X, false) => &ix,
                (Generator::Y, true) => qy,
                (Generator::Y, false) => &iy,
            };
            acc.qmul(q)
        })
    }
}

/// Stack-based free reduction.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                let g = match l.generator {
                    Generator::X => "x",
                    Generator::Y => "y",
                };
                if l.exponent > 0 {
                    g.to_string()
                } else {
                    format!("{g}^-1")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    /// Parses the compact form `x y^-1 x^-1 y`; `1` or empty is the identity.
    /// Integer powers such as `x^3` are expanded.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Self::empty());
        }
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (g, e) = match tok.split_once('^') {
                Some((g, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad exponent in {tok:?}")))?;
                    (g, e)
                }
                None => (tok, 1),
            };
            let generator = match g {
                "x" => Generator::X,
                "y" => Generator::Y,
                _ => return Err(Error::InvalidInput(format!("unknown generator {g:?}"))),
            };
            let unit = if e < 0 { -1 } else { 1 };
            letters.extend(std::iter::repeat_n(Letter::new(generator, unit), e.unsigned_abs() as usize));
        }
        Ok(Self::from_letters(letters))
    }
}

impl TryFrom<String> for GroupWord {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupWord> for String {
    fn from(w: GroupWord) -> String {
        w.to_string()
    }
}

/// The two-bridge knot `b(2n+1, k)` with relator `W x = y W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoBridgeKnot {
    n: u32,
    k: u32,
}

impl TwoBridgeKnot {
    /// Requires `n ≥ 1`, `k` odd, `0 < k < 2n+1`, `gcd(k, 2n+1) = 1`.
    pub fn new(n: u32, k: u32) -> Result<Self> {
        let p = 2 * n as u64 + 1;
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if k.is_multiple_of(2) || k as u64 >= p || k == 0 {
            return Err(Error::InvalidInput(format!("k must be odd with 0 < k < {p}, got {k}")));
        }
        if (k as u64).gcd(&p) != 1 {
            return Err(Error::InvalidInput(format!("k = {k} is not coprime to {p}")));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `2n + 1`, the determinant of the knot.
    pub fn determinant(&self) -> u32 {
        2 * self.n + 1
    }

    /// `b(2n+1, 1)` is the `(2, 2n+1)` torus knot; no other canonical odd `k` is.
    pub fn is_torus_knot(&self) -> bool {
        self.k == 1
    }

    /// `ε(i) = (−1)^⌊ik/(2n+1)⌋` for `i = 1..=2n`.
    pub fn epsilon(&self) -> Vec<i8> {
        let p = self.determinant() as u64;
        (1..=2 * self.n as u64)
            .map(|i| if (i * self.k as u64 / p).is_multiple_of(2) { 1 } else { -1 })
            .collect()
    }

    /// `W = x^ε(1) y^ε(2) ⋯ y^ε(2n)`.
    pub fn relator_word(&self) -> GroupWord {
        let letters = self.epsilon().into_iter().enumerate().map(|(i, e)| {
            let g = if i % 2 == 0 { Generator::X } else { Generator::Y };
            Letter::new(g, e)
        });
        GroupWord::from_letters(letters)
    }

    /// `β = W* W`, peripheral (commutes with `x`).
    pub fn beta(&self) -> GroupWord {
        let w = self.relator_word();
        w.star().concat(&w)
    }

    /// `e = Σ ε(i)`.
    pub fn exponent_sum(&self) -> i64 {
        self.relator_word().exponent_sum()
    }

    /// `λ = β x^(−2e)`, a peripheral element with zero abelianized exponent.
    pub fn longitude(&self) -> GroupWord {
        self.beta().concat(&GroupWord::x().pow(-2 * self.exponent_sum()))
    }

    /// The full relator `W x W⁻¹ y⁻¹`.
    pub fn relator(&self) -> GroupWord {
        let w = self.relator_word();
        w.concat(&GroupWord::x()).concat(&w.inverse()).concat(&GroupWord::y().inverse())
    }

    /// Peripheral word of `μ^m λ^n`.
    pub fn slope_word(&self, m: i64, n: i64) -> GroupWord {
        GroupWord::x().pow(m).concat(&self.longitude().pow(n))
    }
}

impl fmt::Display for TwoBridgeKnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b({},{})", self.determinant(), self.k)
    }
}

/// The `(p, q)` torus knot with group `⟨x, y | x^p = y^q⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusKnot {
    p: i64,
    q: i64,
}

impl TorusKnot {
    /// Requires `1 < p < q` and `gcd(p, q) = 1`.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if !(1 < p && p < q) {
            return Err(Error::InvalidInput(format!("need 1 < p < q, got ({p}, {q})")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidInput(format!("p = {p} and q = {q} are not coprime")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn pq(&self) -> i64 {
        self.p * self.q
    }

    /// `(u, v)` with `q u + p v = 1` and `u` the least positive solution.
    pub fn meridian_exponents(&self) -> (i64, i64) {
        // u ≡ q⁻¹ (mod p), nonzero since gcd(p, q) = 1
        let u = self.q.extended_gcd(&self.p).x.rem_euclid(self.p);
        let v = (1 - self.q * u) / self.p;
        debug_assert_eq!(self.q * u + self.p * v, 1);
        (u, v)
    }

    /// `μ = x^u y^v`, abelianizing to `t` under `x ↦ t^q`, `y ↦ t^p`.
    pub fn meridian(&self) -> GroupWord {
        let (u, v) = self.meridian_exponents();
        GroupWord::x().pow(u).concat(&GroupWord::y().pow(v))
    }

    /// The central element `ζ = x^p`.
    pub fn zeta(&self) -> GroupWord {
        GroupWord::x().pow(self.p)
    }

    /// Peripheral word `μ^g ζ^h`.
    pub fn peripheral_word(&self, g: i64, h: i64) -> GroupWord {
        self.meridian().pow(g).concat(&self.zeta().pow(h))
    }
}

impl fmt::Display for TorusKnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.p, self.q)
    }
}

/// All valid two-bridge inputs with `2n + 1 ≤ max_det`.
pub fn two_bridge_knots_up_to(max_det: u32) -> Vec<TwoBridgeKnot> {
    (1..=(max_det.saturating_sub(1)) / 2)
        .flat_map(|n| (1..2 * n + 1).filter_map(move |k| TwoBridgeKnot::new(n, k).ok()))
        .collect()
}

/// All valid torus knots with `q ≤ max_q`.
pub fn torus_knots_up_to(max_q: i64) -> Vec<TorusKnot> {
    (2..=max_q)
        .flat_map(|q| (2..q).filter_map(move |p| TorusKnot::new(p, q).ok()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{qrot, SpherePoint};
    use proptest::prelude::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    fn arb_word() -> impl Strategy<Value = GroupWord> {
        prop::collection::vec((any::<bool>(), any::<bool>()), 0..24).prop_map(|v| {
            GroupWord::from_letters(v.into_iter().map(|(gx, pos)| {
                Letter::new(if gx { Generator::X } else { Generator::Y }, if pos { 1 } else { -1 })
            }))
        })
    }

    fn arb_quat() -> impl Strategy<Value = UnitQuaternion> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
            .prop_map(|(a, b, c, d)| UnitQuaternion::new(a, b, c, d).unwrap())
    }

    #[test]
    fn knot_validation() {
        assert!(TwoBridgeKnot::new(2, 3).is_ok());
        assert!(TwoBridgeKnot::new(2, 2).is_err());
        assert!(TwoBridgeKnot::new(2, 5).is_err());
        assert!(TwoBridgeKnot::new(4, 3).is_err()); // gcd(3, 9) = 3
        assert!(TwoBridgeKnot::new(0, 1).is_err());
        assert!(TorusKnot::new(2, 4).is_err());
        assert!(TorusKnot::new(3, 2).is_err());
        assert!(TorusKnot::new(1, 2).is_err());
    }

    #[test]
    fn relator_words() {
        assert_eq!(TwoBridgeKnot::new(1, 1).unwrap().relator_word(), w("x y"));
        // ⌊3i/5⌋ = 0, 1, 1, 2
        assert_eq!(TwoBridgeKnot::new(2, 3).unwrap().relator_word(), w("x y^-1 x^-1 y"));
    }

    #[test]
    fn epsilon_symmetry() {
        for k in two_bridge_knots_up_to(15) {
            let e = k.epsilon();
            let len = e.len();
            for i in 0..len {
                assert_eq!(e[i], e[len - 1 - i], "{k}");
            }
        }
    }

    #[test]
    fn star_examples() {
        assert_eq!(w("x y").star(), w("y x"));
        let fig8 = TwoBridgeKnot::new(2, 3).unwrap().relator_word();
        assert_eq!(fig8.star(), w("y x^-1 y^-1 x"));
    }

    #[test]
    fn symmetry_identities() {
        for k in two_bridge_knots_up_to(15) {
            let wd = k.relator_word();
            assert_eq!(wd.invert_generators(), wd.star().inverse(), "{k}");
            assert_eq!(wd.star().invert_generators(), wd.inverse(), "{k}");
        }
        assert_eq!(w("x").invert_generators(), w("x^-1"));
    }

    #[test]
    fn beta_examples() {
        let trefoil = TwoBridgeKnot::new(1, 1).unwrap();
        assert_eq!(trefoil.beta(), w("y x x y"));
        assert_eq!(trefoil.beta().exponent_sum(), 4);
        let fig8 = TwoBridgeKnot::new(2, 3).unwrap();
        assert_eq!(fig8.beta(), w("y x^-1 y^-1 x x y^-1 x^-1 y"));
        assert_eq!(fig8.beta().exponent_sum(), 0);
        for k in two_bridge_knots_up_to(15) {
            assert_eq!(k.beta().exponent_sum(), 2 * k.exponent_sum());
            assert_eq!(k.longitude().exponent_sum(), 0);
        }
    }

    #[test]
    fn exponent_sums() {
        assert_eq!(w("x y").exponent_sum(), 2);
        assert_eq!(w("x y^-1").exponent_sum(), 0);
    }

    #[test]
    fn evaluate_examples() {
        let q = qrot(&SpherePoint::E2, 0.4);
        assert_eq!(GroupWord::empty().evaluate(&q, &q), UnitQuaternion::IDENTITY);
        assert!(w("x y^-1").evaluate(&q, &q).distance_to_identity() < 1e-15);
    }

    #[test]
    fn text_form() {
        let s = "x y^-1 x^-1 y";
        assert_eq!(w(s).to_string(), s);
        assert_eq!(w("x^2 y^-3").len(), 5);
        assert_eq!(w("x x^-1"), GroupWord::empty());
        assert_eq!(GroupWord::empty().to_string(), "1");
        assert!("x z".parse::<GroupWord>().is_err());
        let json = serde_json::to_string(&w(s)).unwrap();
        assert_eq!(json, format!("\"{s}\""));
        assert_eq!(serde_json::from_str::<GroupWord>(&json).unwrap(), w(s));
    }

    #[test]
    fn torus_meridians() {
        assert_eq!(TorusKnot::new(2, 3).unwrap().meridian(), w("x y^-1"));
        assert_eq!(TorusKnot::new(3, 5).unwrap().meridian(), w("x^2 y^-3"));
        for t in torus_knots_up_to(9) {
            let (u, v) = t.meridian_exponents();
            assert_eq!(t.q() * u + t.p() * v, 1, "{t}");
            assert!(u >= 1 && u < t.p());
        }
    }

    proptest! {
        #[test]
        fn reduction_idempotent(v in prop::collection::vec((any::<bool>(), any::<bool>()), 0..40)) {
            let letters: Vec<Letter> = v.into_iter().map(|(gx, pos)| {
                Letter::new(if gx { Generator::X } else { Generator::Y }, if pos { 1 } else { -1 })
            }).collect();
            let once = free_reduce(letters.clone());
            prop_assert!(once.len() <= letters.len());
            prop_assert_eq!(free_reduce(once.clone()), once.clone());
            prop_assert!(once.windows(2).all(|p| !p[0].cancels(p[1])));
        }

        #[test]
        fn star_involution(a in arb_word()) {
            prop_assert_eq!(a.star().star(), a);
        }

        #[test]
        fn evaluate_multiplicative(a in arb_word(), b in arb_word(), qx in arb_quat(), qy in arb_quat()) {
            let lhs = a.concat(&b).evaluate(&qx, &qy);
            let rhs = a.evaluate(&qx, &qy) * b.evaluate(&qx, &qy);
            prop_assert!(lhs.distance(&rhs) < 1e-12);
        }

        #[test]
        fn evaluate_equivariant(a in arb_word(), qx in arb_quat(), qy in arb_quat(), g in arb_quat()) {
            let lhs = a.evaluate(&qx.conjugate_by(&g), &qy.conjugate_by(&g));
            let rhs = a.evaluate(&qx, &qy).conjugate_by(&g);
            prop_assert!(lhs.distance(&rhs) < 1e-10);
        }
    }
}
