//! Common contract the concrete group models implement so the scale engine,
//! flat-group machinery, and CLI can drive any of them uniformly.
//!
//! A model packages: a group element type (acting by conjugation or as an
//! automorphism), a compact open subgroup type with decidable equality, the
//! lattice operations meet/join, relative indices, and the model's own tidy
//! procedure. Every model must keep two independent routes to the scale and
//! cross-check them internally.

use crate::error::Result;
use crate::index::{Displacement, IndexValue};
use std::fmt::Debug;

/// Result of iterating a subgroup chain to a stable limit.
#[derive(Debug, Clone)]
pub struct ChainLimit<S> {
    pub subgroup: S,
    /// steps taken until the certificate held
    pub depth: usize,
    /// true when the loop stopped at the depth cap without a certificate
    pub truncated: bool,
}

/// Everything the tidying procedure produced, kept so callers can re-verify
/// each claim instead of trusting the pipeline.
#[derive(Debug, Clone)]
pub struct TidyCertificate<S> {
    pub input: S,
    pub tidy: S,
    /// chain depth used by the minimization stage
    pub depth: usize,
    /// [g V g^{-1} : g V g^{-1} meet V] at the input subgroup
    pub input_index: IndexValue,
    /// the same index at the tidy subgroup; equals the scale
    pub minimized_index: IndexValue,
    /// factorization witnesses where the model has them (None for models
    /// whose tidiness certificate is geometric rather than a factorization)
    pub plus_part: Option<S>,
    pub minus_part: Option<S>,
    /// bounded two-sided part absorbed in the final step
    pub core: Option<S>,
    /// the one-sided parts recombine to the tidy subgroup
    pub ta_held: bool,
    /// the bounded part is contained in the tidy subgroup
    pub tb_held: bool,
}

pub trait GroupModel {
    type Elem: Clone + Debug;
    type Subgroup: Clone + Debug + PartialEq;

    fn name(&self) -> &'static str;

    /// Canonical compact open subgroup the model starts from.
    fn base(&self) -> Self::Subgroup;

    fn apply(&self, g: &Self::Elem, v: &Self::Subgroup) -> Result<Self::Subgroup>;

    fn invert(&self, g: &Self::Elem) -> Result<Self::Elem>;

    fn compose(&self, g: &Self::Elem, h: &Self::Elem) -> Result<Self::Elem>;

    /// Intersection of compact open subgroups.
    fn meet(&self, a: &Self::Subgroup, b: &Self::Subgroup) -> Result<Self::Subgroup>;

    /// Smallest compact open subgroup containing both, when one exists.
    fn join(&self, a: &Self::Subgroup, b: &Self::Subgroup) -> Result<Self::Subgroup>;

    /// [a : a meet b], always finite for commensurable compact opens.
    fn rel_index(&self, a: &Self::Subgroup, b: &Self::Subgroup) -> Result<IndexValue>;

    fn equal(&self, a: &Self::Subgroup, b: &Self::Subgroup) -> bool;

    /// Runs the model's tidying procedure for `g` starting from `start`.
    fn tidy(&self, g: &Self::Elem, start: &Self::Subgroup) -> Result<TidyCertificate<Self::Subgroup>>;

    /// Limit of the descending chain V, V meet gVg^{-1}, ... with the model's
    /// own stabilization certificate attached.
    fn plus_part(
        &self,
        g: &Self::Elem,
        v: &Self::Subgroup,
        max_depth: usize,
    ) -> Result<ChainLimit<Self::Subgroup>>;

    fn minus_part(
        &self,
        g: &Self::Elem,
        v: &Self::Subgroup,
        max_depth: usize,
    ) -> Result<ChainLimit<Self::Subgroup>> {
        self.plus_part(&self.invert(g)?, v, max_depth)
    }

    /// Decides whether v = a.b for subgroups a, b of v. The default uses the
    /// coset count [v : v meet b] = [a : a meet b], which characterizes a
    /// covering product; models where that index can be infinite override it.
    fn product_equals(
        &self,
        v: &Self::Subgroup,
        a: &Self::Subgroup,
        b: &Self::Subgroup,
    ) -> Result<bool> {
        let lhs = self.rel_index(v, b)?;
        let rhs = self.rel_index(a, b)?;
        Ok(lhs == rhs)
    }

    /// Splits a common minimizing subgroup for the family `gens` into the
    /// finest directions on which every generator expands or contracts by a
    /// single factor. None means the model offers no such decomposition and
    /// only uniscalar families can be factored.
    fn scale_directions(
        &self,
        gens: &[Self::Elem],
        v: &Self::Subgroup,
    ) -> Result<Option<Vec<Self::Subgroup>>> {
        let _ = (gens, v);
        Ok(None)
    }

    /// The scale of `g`, computed by the model with its internal dual-route
    /// cross-check.
    fn scale(&self, g: &Self::Elem) -> Result<IndexValue>;

    /// Both one-sided indices between two compact opens.
    fn displacement(&self, a: &Self::Subgroup, b: &Self::Subgroup) -> Result<Displacement> {
        let meet = self.meet(a, b)?;
        let left = self.rel_index(a, &meet)?;
        let right = self.rel_index(b, &meet)?;
        Ok(Displacement::new(left, right))
    }

    fn is_uniscalar(&self, g: &Self::Elem) -> Result<bool> {
        let s = self.scale(g)?;
        let s_inv = self.scale(&self.invert(g)?)?;
        Ok(s.is_one() && s_inv.is_one())
    }
}
