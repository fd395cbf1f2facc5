//! KK-classes modelled through a split universal coefficient sequence.
//!
//! A class `A → B` is a pair `(t⁰, t¹)`: a homomorphism `t⁰: K(A) → K(B)` and
//! an extension class `t¹ ∈ Ext(K(A), K(B))` of the opposite degree.
//! Composition multiplies these as lower triangular matrices, so a product
//! of two Ext parts vanishes.

use crate::error::{Error, Result};
use crate::ext::{pull_ext, push_ext, ExtElement};
use crate::group::GradedGroup;
use crate::map::GradedMap;

#[derive(Clone, Debug)]
pub struct UctClass {
    pub even: GradedMap,
    pub odd: ExtElement,
}

impl UctClass {
    pub fn new(even: GradedMap, odd: ExtElement) -> Result<Self> {
        if even.source().gens() != odd.source().gens() || even.target().gens() != odd.target().gens() {
            return Err(Error::Dimension(
                "Hom and Ext parts have different source or target".into(),
            ));
        }
        if (even.degree() + 1) % 2 != odd.degree() {
            return Err(Error::invalid(
                "uct class",
                "Ext part must have the degree opposite to the Hom part",
            ));
        }
        Ok(UctClass { even, odd })
    }

    pub fn identity(g: &GradedGroup) -> Self {
        UctClass {
            even: GradedMap::identity(g),
            odd: ExtElement::zero(g, g, 1),
        }
    }

    /// `(f, 0)`.
    pub fn from_map(f: &GradedMap) -> Self {
        UctClass {
            even: f.clone(),
            odd: ExtElement::zero(f.source(), f.target(), f.degree() + 1),
        }
    }

    pub fn source(&self) -> &GradedGroup {
        self.even.source()
    }

    pub fn target(&self) -> &GradedGroup {
        self.even.target()
    }

    pub fn degree(&self) -> u8 {
        self.even.degree()
    }

    /// Equality of both parts (the Ext part in Ext, the Hom part as maps).
    pub fn equals(&self, other: &UctClass) -> bool {
        self.even.equals(&other.even) && self.odd.equals(&other.odd)
    }
}

/// `s ∘ t`: even part `s⁰t⁰`, odd part `s⁰t¹ + s¹t⁰`.
pub fn uct_compose(s: &UctClass, t: &UctClass) -> Result<UctClass> {
    let even = s.even.compose(&t.even)?;
    let odd = push_ext(&t.odd, &s.even)?.add(&pull_ext(&s.odd, &t.even)?)?;
    UctClass::new(even, odd)
}

/// The two-sided inverse, defined exactly when `t⁰` is bijective.
pub fn uct_invert(t: &UctClass) -> Option<UctClass> {
    let inv = t.even.inverse()?;
    let odd = pull_ext(&push_ext(&t.odd, &inv).ok()?, &inv).ok()?.neg();
    UctClass::new(inv, odd).ok()
}
