//! Seeded instance generators.
//!
//! Every random draw comes from SplitMix64 with its state initialised to the
//! seed (`rand_xoshiro::SplitMix64::seed_from_u64`). Draws are made in a
//! fixed order and mapped as follows, so another implementation of
//! SplitMix64 reproduces the same instances:
//!
//! - an integer in `lo..=hi` is `lo + next_u64() % (hi - lo + 1)`;
//! - an event of probability `p` happens when `(next_u64() >> 11) * 2^-53 < p`.
//!
//! Random costs are integers in [`COST_RANGE`]. Experiment sweeps derive the
//! seed of instance `i` as output `i` of a SplitMix64 stream seeded with the
//! sweep seed (see [`instance_seeds`]).

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{CliError, Result};
use crate::instance::{InstanceFile, Provenance, SystemSpec};

/// Inclusive range of randomly drawn costs.
pub const COST_RANGE: (u64, u64) = (1, 9);
/// Probability of each optional edge between consecutive layers.
pub const CROSS_EDGE_PROBABILITY: f64 = 0.3;
/// Redraws allowed when a random graph comes out without edges.
const MAX_REDRAWS: usize = 64;

/// Deterministic draw sequence.
pub struct Stream(SplitMix64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn int(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next_u64() % (hi - lo + 1)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        ((self.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < p
    }

    fn costs(&mut self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| self.int(COST_RANGE.0, COST_RANGE.1) as f64)
            .collect()
    }
}

/// Seeds of the first `count` instances of a sweep.
pub fn instance_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut stream = Stream::new(seed);
    (0..count).map(|_| stream.next_u64()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GeneratorKind {
    LayeredDag,
    ParallelPaths,
    RandomGnpCover,
    Star,
    Clique,
    Multipartite,
    ROutOfK,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::LayeredDag => "layered-dag",
            GeneratorKind::ParallelPaths => "parallel-paths",
            GeneratorKind::RandomGnpCover => "random-gnp-cover",
            GeneratorKind::Star => "star",
            GeneratorKind::Clique => "clique",
            GeneratorKind::Multipartite => "multipartite",
            GeneratorKind::ROutOfK => "r-out-of-k",
        }
    }
}

/// A generator family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `layers` layers of `width` vertices between `s` and `t`: all source
    /// and sink edges, a straight edge per position between consecutive
    /// layers and random cross edges. Costs are random.
    LayeredDag {
        layers: usize,
        width: usize,
        k: usize,
    },
    /// Internally disjoint s-t paths with the given edge counts, bought with
    /// `k = lengths.len() - 1`. Edges of the first path cost 1, all others 0.
    ParallelPaths { lengths: Vec<usize> },
    /// G(n, p) vertex-cover instance with random costs, redrawn until it has
    /// an edge.
    RandomGnpCover { n: usize, p: f64 },
    /// Vertex 0 joined to `m` leaves; the centre costs 1, leaves cost 0.
    Star { m: usize },
    /// Complete graph with random costs.
    Clique { n: usize },
    /// Complete multipartite graph with random costs.
    Multipartite { sizes: Vec<usize> },
    /// Groups of the given sizes over consecutive agent ids with random
    /// costs, buying `r` groups.
    ROutOfK { sizes: Vec<usize>, r: usize },
}

impl Generator {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            Generator::LayeredDag { .. } => GeneratorKind::LayeredDag,
            Generator::ParallelPaths { .. } => GeneratorKind::ParallelPaths,
            Generator::RandomGnpCover { .. } => GeneratorKind::RandomGnpCover,
            Generator::Star { .. } => GeneratorKind::Star,
            Generator::Clique { .. } => GeneratorKind::Clique,
            Generator::Multipartite { .. } => GeneratorKind::Multipartite,
            Generator::ROutOfK { .. } => GeneratorKind::ROutOfK,
        }
    }

    /// Name and parameters, e.g. `layered-dag(layers=3,width=3,k=2)`.
    pub fn describe(&self) -> String {
        let list = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let params = match self {
            Generator::LayeredDag { layers, width, k } => {
                format!("layers={layers},width={width},k={k}")
            }
            Generator::ParallelPaths { lengths } => format!("lengths=[{}]", list(lengths)),
            Generator::RandomGnpCover { n, p } => format!("n={n},p={p}"),
            Generator::Star { m } => format!("m={m}"),
            Generator::Clique { n } => format!("n={n}"),
            Generator::Multipartite { sizes } => format!("sizes=[{}]", list(sizes)),
            Generator::ROutOfK { sizes, r } => format!("sizes=[{}],r={r}", list(sizes)),
        };
        format!("{}({params})", self.kind().name())
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Params(m));
        match self {
            Generator::LayeredDag { layers, width, k } => {
                if *layers == 0 || *k == 0 || *width < k + 1 {
                    return fail(format!(
                        "layered-dag needs layers >= 1, k >= 1 and width >= k + 1 (got layers {layers}, width {width}, k {k})"
                    ));
                }
            }
            Generator::ParallelPaths { lengths } => {
                if lengths.len() < 2 || lengths.contains(&0) {
                    return fail(
                        "parallel-paths needs at least two paths of positive length".into(),
                    );
                }
            }
            Generator::RandomGnpCover { n, p } => {
                if *n < 2 || !(*p > 0.0 && *p <= 1.0) {
                    return fail(format!(
                        "random-gnp-cover needs n >= 2 and 0 < p <= 1 (got n {n}, p {p})"
                    ));
                }
            }
            Generator::Star { m } => {
                if *m == 0 {
                    return fail("star needs at least one leaf".into());
                }
            }
            Generator::Clique { n } => {
                if *n < 2 {
                    return fail("clique needs at least two vertices".into());
                }
            }
            Generator::Multipartite { sizes } => {
                if sizes.len() < 2 || sizes.contains(&0) {
                    return fail("multipartite needs at least two non-empty parts".into());
                }
            }
            Generator::ROutOfK { sizes, r } => {
                if sizes.contains(&0) || *r == 0 || *r >= sizes.len() {
                    return fail(format!(
                        "r-out-of-k needs non-empty groups and 1 <= r < number of groups (got {} groups, r {r})",
                        sizes.len()
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Builds the instance for `generator` and `seed`. The same pair always
/// yields the same file.
pub fn generate(generator: &Generator, seed: u64) -> Result<InstanceFile> {
    generator.validate()?;
    let mut stream = Stream::new(seed);
    let mut file = match generator {
        Generator::LayeredDag { layers, width, k } => {
            let (layers, width) = (*layers, *width);
            let n = 2 + layers * width;
            let t = n - 1;
            let id = |l: usize, j: usize| 1 + l * width + j;
            let mut edges: Vec<(usize, usize)> = (0..width).map(|j| (0, id(0, j))).collect();
            for l in 0..layers - 1 {
                for i in 0..width {
                    for j in 0..width {
                        if i == j || stream.chance(CROSS_EDGE_PROBABILITY) {
                            edges.push((id(l, i), id(l + 1, j)));
                        }
                    }
                }
            }
            edges.extend((0..width).map(|j| (id(layers - 1, j), t)));
            let costs = stream.costs(edges.len());
            let mut file = InstanceFile::new(
                SystemSpec::KPath {
                    vertices: n,
                    source: 0,
                    sink: t,
                    edges,
                },
                costs,
            );
            file.k = Some(*k);
            file
        }
        Generator::ParallelPaths { lengths } => {
            let mut edges = Vec::new();
            let mut costs = Vec::new();
            let mut next = 2;
            for (p, &len) in lengths.iter().enumerate() {
                let mut u = 0;
                for i in 0..len {
                    let v = if i + 1 == len {
                        1
                    } else {
                        next += 1;
                        next - 1
                    };
                    edges.push((u, v));
                    costs.push(if p == 0 { 1.0 } else { 0.0 });
                    u = v;
                }
            }
            let mut file = InstanceFile::new(
                SystemSpec::KPath {
                    vertices: next,
                    source: 0,
                    sink: 1,
                    edges,
                },
                costs,
            );
            file.k = Some(lengths.len() - 1);
            file
        }
        Generator::RandomGnpCover { n, p } => {
            let mut edges = Vec::new();
            for _ in 0..MAX_REDRAWS {
                edges = pairs(*n).filter(|_| stream.chance(*p)).collect();
                if !edges.is_empty() {
                    break;
                }
            }
            if edges.is_empty() {
                return Err(CliError::Params(format!(
                    "random-gnp-cover drew no edge in {MAX_REDRAWS} attempts; raise p"
                )));
            }
            let costs = stream.costs(*n);
            InstanceFile::new(
                SystemSpec::VertexCover {
                    vertices: *n,
                    edges,
                },
                costs,
            )
        }
        Generator::Star { m } => {
            let mut costs = vec![0.0; m + 1];
            costs[0] = 1.0;
            InstanceFile::new(
                SystemSpec::VertexCover {
                    vertices: m + 1,
                    edges: (1..=*m).map(|l| (0, l)).collect(),
                },
                costs,
            )
        }
        Generator::Clique { n } => InstanceFile::new(
            SystemSpec::VertexCover {
                vertices: *n,
                edges: pairs(*n).collect(),
            },
            stream.costs(*n),
        ),
        Generator::Multipartite { sizes } => {
            let part: Vec<usize> = sizes
                .iter()
                .enumerate()
                .flat_map(|(i, &s)| std::iter::repeat_n(i, s))
                .collect();
            let n = part.len();
            InstanceFile::new(
                SystemSpec::VertexCover {
                    vertices: n,
                    edges: pairs(n).filter(|&(u, v)| part[u] != part[v]).collect(),
                },
                stream.costs(n),
            )
        }
        Generator::ROutOfK { sizes, r } => {
            let mut groups = Vec::new();
            let mut next = 0;
            for &s in sizes {
                groups.push((next..next + s).collect());
                next += s;
            }
            let mut file = InstanceFile::new(SystemSpec::ROutOfK { groups }, stream.costs(next));
            file.r = Some(*r);
            file
        }
    };
    file.provenance = Some(Provenance {
        generator: generator.describe(),
        seed,
    });
    Ok(file)
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}
