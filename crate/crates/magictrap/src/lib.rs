// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod atomdata;
pub mod coherence;
pub mod magic;
pub mod quad;
pub mod scatter;
pub mod special;
pub mod stark;
pub mod tables;
pub mod units;
pub mod zeeman;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/angular.md")]
    mod angular {}
    #[doc = include_str!("../../../book/src/light-shifts.md")]
    mod light_shifts {}
    #[doc = include_str!("../../../book/src/magic.md")]
    mod magic {}
    #[doc = include_str!("../../../book/src/zeeman.md")]
    mod zeeman {}
    #[doc = include_str!("../../../book/src/scattering.md")]
    mod scattering {}
    #[doc = include_str!("../../../book/src/coherence.md")]
    mod coherence {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
