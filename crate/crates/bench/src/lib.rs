//! Inputs shared by the criterion benchmarks.

use frugal_cli::{generate, Generator, Instance};

/// A validated generated instance.
pub fn instance(generator: &Generator, seed: u64) -> Instance {
    generate(generator, seed)
        .and_then(|file| file.validate())
        .expect("benchmark generators use valid parameters")
}

pub fn layered(k: usize, layers: usize, seed: u64) -> Instance {
    instance(
        &Generator::LayeredDag {
            layers,
            width: k + 2,
            k,
        },
        seed,
    )
}

pub fn gnp_cover(n: usize, seed: u64) -> Instance {
    instance(&Generator::RandomGnpCover { n, p: 0.4 }, seed)
}

pub fn groups(sizes: &[usize], r: usize, seed: u64) -> Instance {
    instance(
        &Generator::ROutOfK {
            sizes: sizes.to_vec(),
            r,
        },
        seed,
    )
}
