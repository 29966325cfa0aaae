//! Group model for the lamplighter-style shift: elements combine a power of
//! the shift with a finitely supported lamp translation, compact opens are
//! the window codes, and the scale has an exact closed form that the tidying
//! chain route is checked against.

use super::code::AnnihilatorCode;
use super::{BitVec, Window};
use crate::error::{Error, Result};
use crate::index::IndexValue;
use crate::model::{ChainLimit, GroupModel, TidyCertificate};

/// shift^tau followed by adding the lamp configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftElem {
    pub tau: i64,
    pub trans: BitVec,
}

#[derive(Debug, Clone, Copy)]
pub struct ShiftModel {
    pub window: Window,
}

impl ShiftModel {
    pub fn new(window: Window) -> ShiftModel {
        ShiftModel { window }
    }

    pub fn identity(&self) -> ShiftElem {
        ShiftElem {
            tau: 0,
            trans: BitVec::zero(self.window),
        }
    }

    pub fn elem(&self, tau: i64, lamps: &[i64]) -> Result<ShiftElem> {
        Ok(ShiftElem {
            tau,
            trans: BitVec::from_positions(self.window, lamps)?,
        })
    }

    /// Exact scale of shift^t times any lamp translation: the lamp part is
    /// absorbed by the abelian kernel, and the shift contracts the standard
    /// code for t >= 0 and expands it by 2^{-t} otherwise.
    pub fn closed_form_scale(&self, g: &ShiftElem) -> IndexValue {
        IndexValue::prime_power(2, (-g.tau).max(0) as u64)
    }

    fn chain_cap(&self) -> usize {
        2 * self.window.len() as usize + 4
    }
}

impl GroupModel for ShiftModel {
    type Elem = ShiftElem;
    type Subgroup = AnnihilatorCode;

    fn name(&self) -> &'static str {
        "shift"
    }

    fn base(&self) -> AnnihilatorCode {
        AnnihilatorCode::right_half(self.window)
    }

    fn apply(&self, g: &ShiftElem, v: &AnnihilatorCode) -> Result<AnnihilatorCode> {
        // lamp translations centralize the lamp part, only the shift acts
        v.conjugate(g.tau)
    }

    fn invert(&self, g: &ShiftElem) -> Result<ShiftElem> {
        Ok(ShiftElem {
            tau: -g.tau,
            trans: g.trans.shift(g.tau)?,
        })
    }

    fn compose(&self, g: &ShiftElem, h: &ShiftElem) -> Result<ShiftElem> {
        Ok(ShiftElem {
            tau: g.tau + h.tau,
            trans: g.trans.shift(-h.tau)?.add(&h.trans)?,
        })
    }

    fn meet(&self, a: &AnnihilatorCode, b: &AnnihilatorCode) -> Result<AnnihilatorCode> {
        a.meet(b)
    }

    fn join(&self, a: &AnnihilatorCode, b: &AnnihilatorCode) -> Result<AnnihilatorCode> {
        a.join(b)
    }

    fn rel_index(&self, a: &AnnihilatorCode, b: &AnnihilatorCode) -> Result<IndexValue> {
        a.index_over(b)
    }

    fn equal(&self, a: &AnnihilatorCode, b: &AnnihilatorCode) -> bool {
        a == b
    }

    fn tidy(&self, g: &ShiftElem, start: &AnnihilatorCode) -> Result<TidyCertificate<AnnihilatorCode>> {
        let s_fwd = self.closed_form_scale(g);
        let g_inv = self.invert(g)?;
        let s_bwd = self.closed_form_scale(&g_inv);
        let input_index = self.rel_index(&self.apply(g, start)?, start)?;

        let measure = |v: &AnnihilatorCode| -> Result<(IndexValue, IndexValue)> {
            let fwd = self.rel_index(&self.apply(g, v)?, v)?;
            let bwd = self.rel_index(&self.apply(&g_inv, v)?, v)?;
            Ok((fwd, bwd))
        };
        let start_minimizes = match measure(start) {
            Ok((f, b)) => f == s_fwd && b == s_bwd,
            // a conjugate leaving the window says nothing about the scale;
            // fall through to the base subgroup
            Err(Error::SupportOverflow(_)) => false,
            Err(e) => return Err(e),
        };
        let tidy = if start_minimizes {
            start.clone()
        } else {
            let base = self.base();
            let (f, b) = measure(&base)?;
            if f != s_fwd || b != s_bwd {
                return Err(Error::OracleDisagreement {
                    context: "measured index at the standard code versus the closed-form scale"
                        .into(),
                    computed: format!("forward {f}, backward {b}"),
                    oracle: format!("forward {s_fwd}, backward {s_bwd}"),
                });
            }
            base
        };

        let cap = self.chain_cap();
        let plus = self.plus_part(g, &tidy, cap)?;
        let minus = self.minus_part(g, &tidy, cap)?;
        let ta_held = self.product_equals(&tidy, &plus.subgroup, &minus.subgroup)?;
        let core = plus.subgroup.meet(&minus.subgroup)?;
        let tb_held = core.subgroup_of(&tidy);
        let minimized_index = self.rel_index(&self.apply(g, &tidy)?, &tidy)?;

        Ok(TidyCertificate {
            input: start.clone(),
            tidy,
            depth: plus.depth.max(minus.depth),
            input_index,
            minimized_index,
            plus_part: Some(plus.subgroup),
            minus_part: Some(minus.subgroup),
            core: Some(core),
            ta_held,
            tb_held,
        })
    }

    /// Descending chain through window-restricted conjugates, which agree
    /// with the exact conjugates under every meet taken here. The chain
    /// certificate is literal stabilization; a chain that reaches the window
    /// floor stabilizes there, the floor standing for everything below
    /// window resolution.
    fn plus_part(
        &self,
        g: &ShiftElem,
        v: &AnnihilatorCode,
        max_depth: usize,
    ) -> Result<ChainLimit<AnnihilatorCode>> {
        let mut current = v.clone();
        for depth in 0..=max_depth {
            let next = current.meet(&current.conjugate_restricted(g.tau))?;
            if next == current {
                return Ok(ChainLimit {
                    subgroup: current,
                    depth,
                    truncated: false,
                });
            }
            current = next;
        }
        Err(Error::NoStabilization { max_depth })
    }

    /// Closed form cross-checked against the measured index at the tidy
    /// subgroup produced by the chain route.
    fn scale(&self, g: &ShiftElem) -> Result<IndexValue> {
        let closed = self.closed_form_scale(g);
        let cert = self.tidy(g, &self.base())?;
        if cert.minimized_index != closed {
            return Err(Error::OracleDisagreement {
                context: "tidied index of a shift element versus the closed form".into(),
                computed: cert.minimized_index.to_string(),
                oracle: closed.to_string(),
            });
        }
        Ok(cert.minimized_index)
    }
}
