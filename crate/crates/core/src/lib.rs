#![allow(clippy::needless_range_loop)]

pub mod algebraic;
pub mod automaton;
pub mod cf;
pub mod combinatorics;
pub mod error;
pub mod fractal;
pub mod interval;
pub mod linalg;
pub mod lyapunov;
pub mod presets;
pub mod render;
pub mod scalar;
pub mod seed;
pub mod torus;
pub mod words;
pub mod worms;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/words.md")]
    mod words {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    mod algorithms {}
    #[doc = include_str!("../../../book/src/lyapunov.md")]
    mod lyapunov {}
    #[doc = include_str!("../../../book/src/automaton.md")]
    mod automaton {}
    #[doc = include_str!("../../../book/src/fractals.md")]
    mod fractals {}
    #[doc = include_str!("../../../book/src/torus.md")]
    mod torus {}
    #[doc = include_str!("../../../book/src/presets.md")]
    mod presets {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
