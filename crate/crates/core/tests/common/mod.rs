//! Deterministic corpus of fans and foliated pairs for integration tests.
#![allow(dead_code)]

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfm_core::divisor::{self, ClassSpace};
use tfm_core::fan::standard::*;
use tfm_core::lattice::{primitive_vector, rank_of_int_vectors, rat};
use tfm_core::{Fan, Int, FoliatedPair, FoliationSubspace, IntMatrix, IntVector, Rat, TorusDivisor};

pub const SEED: u64 = 0x7f3a_2026;
pub const MAX_RAYS: usize = 12;

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

#[derive(Clone, Debug)]
pub struct NamedFan {
    pub name: String,
    pub fan: Fan,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub pair: FoliatedPair,
}

fn named(name: &str, fan: Fan) -> NamedFan {
    NamedFan {
        name: name.to_string(),
        fan,
    }
}

pub fn base_fans() -> Vec<NamedFan> {
    let p1 = projective_space(1);
    let p2 = projective_space(2);
    vec![
        named("P2", p2.clone()),
        named("F1", blown_up_plane()),
        named("F2", hirzebruch(2)),
        named("F3", hirzebruch(3)),
        named("P1xP1", product(&p1, &p1)),
        named("P112", weighted_p112()),
        named("P3", projective_space(3)),
        named("P1xP2", product(&p1, &p2)),
        named("P1xP1xP1", product(&product(&p1, &p1), &p1)),
    ]
}

/// Star subdivision at a random positive combination of a face of a random
/// maximal cone. With `smooth` the combination is the plain sum, which
/// keeps smooth fans smooth.
pub fn random_blowup(fan: &Fan, rng: &mut impl Rng, smooth: bool) -> Option<Fan> {
    let n = fan.dim();
    let cone = fan.cones().choose(rng)?.clone();
    let k = rng.gen_range(2..=cone.len());
    let mut face = cone.clone();
    face.shuffle(rng);
    face.truncate(k);
    let mut w = IntVector::zero(n);
    for &i in &face {
        let c = if smooth { 1 } else { rng.gen_range(1..=2) };
        w = w.add(&fan.ray(i).scale(c));
    }
    let w = primitive_vector(&w).ok()?;
    if w.max_abs() > 4 || fan.ray_index(&w).is_some() {
        return None;
    }
    fan.star_subdivision(&w).ok()
}

/// Complete projective simplicial fans: the base fans and iterated star
/// subdivisions of them, at most [`MAX_RAYS`] rays.
pub fn fan_corpus() -> Vec<NamedFan> {
    let mut out = base_fans();
    let mut rng = rng(1);
    let seeds = out.clone();
    for base in seeds.iter().filter(|b| b.fan.is_simplicial()) {
        for variant in 0..5 {
            let smooth = variant % 2 == 0 && base.fan.is_smooth();
            let mut f = base.fan.clone();
            let blowups = rng.gen_range(1..=3);
            for _ in 0..blowups {
                if f.num_rays() >= MAX_RAYS {
                    break;
                }
                for _attempt in 0..8 {
                    if let Some(g) = random_blowup(&f, &mut rng, smooth) {
                        f = g;
                        break;
                    }
                }
            }
            if f.num_rays() > base.fan.num_rays() {
                out.push(named(&format!("{}~b{}v{}", base.name, blowups, variant), f));
            }
        }
    }
    out
}

pub fn smooth_corpus() -> Vec<NamedFan> {
    fan_corpus().into_iter().filter(|f| f.fan.is_smooth()).collect()
}

/// A random rational subspace of rank `r`: either spanned by fan rays or by
/// small random integer vectors.
pub fn random_subspace(fan: &Fan, r: usize, rng: &mut impl Rng) -> FoliationSubspace {
    let n = fan.dim();
    if r == n {
        return FoliationSubspace::full(n);
    }
    for _ in 0..64 {
        let vs: Vec<IntVector> = if rng.gen_bool(0.6) {
            let mut rays = fan.rays().to_vec();
            rays.shuffle(rng);
            rays.truncate(r);
            rays
        } else {
            (0..r)
                .map(|_| IntVector((0..n).map(|_| rng.gen_range(-2..=2)).collect()))
                .collect()
        };
        if rank_of_int_vectors(&vs) == r {
            return FoliationSubspace::from_int(&vs, n).expect("independent vectors");
        }
    }
    FoliationSubspace::from_int(&fan.rays()[..r], n).expect("fallback")
}

/// Random effective boundary supported on rays inside `V`, coefficients in `[0, 1]`.
pub fn random_boundary(fan: &Fan, v: &FoliationSubspace, rng: &mut impl Rng) -> TorusDivisor {
    const VALUES: [(i64, i64); 6] = [(0, 1), (0, 1), (1, 4), (1, 2), (2, 3), (1, 1)];
    let mut d = TorusDivisor::zero(fan.num_rays());
    for (i, u) in fan.rays().iter().enumerate() {
        if v.contains(u) && rng.gen_bool(0.4) {
            let (p, q) = *VALUES.choose(rng).unwrap();
            d.coeffs[i] = rat(p, q);
        }
    }
    d
}

/// Pairs of every rank on every corpus fan, with and without boundary.
pub fn pair_corpus() -> Vec<Instance> {
    let mut rng = rng(2);
    let mut out = Vec::new();
    for nf in fan_corpus() {
        let n = nf.fan.dim();
        for r in 1..=n {
            for with_delta in [false, true] {
                let v = random_subspace(&nf.fan, r, &mut rng);
                let delta = if with_delta {
                    random_boundary(&nf.fan, &v, &mut rng)
                } else {
                    TorusDivisor::zero(nf.fan.num_rays())
                };
                let pair = FoliatedPair::new(nf.fan.clone(), v, delta).expect("simplicial pair");
                out.push(Instance {
                    name: format!("{}/r{}{}", nf.name, r, if with_delta { "+D" } else { "" }),
                    pair,
                });
            }
        }
    }
    out
}

/// Pairs with `V = N_Q` and random boundary on every corpus fan.
pub fn full_rank_corpus(count: usize) -> Vec<Instance> {
    let mut rng = rng(3);
    let fans = fan_corpus();
    (0..count)
        .map(|k| {
            let nf = &fans[k % fans.len()];
            let v = FoliationSubspace::full(nf.fan.dim());
            let delta = random_boundary(&nf.fan, &v, &mut rng);
            Instance {
                name: format!("{}/full#{k}", nf.name),
                pair: FoliatedPair::new(nf.fan.clone(), v, delta).expect("pair"),
            }
        })
        .collect()
}

/// Up to `count` distinct ample Cartier divisors on a smooth projective fan.
pub fn ample_sample(fan: &Fan, count: usize, rng: &mut impl Rng) -> Vec<TorusDivisor> {
    let mut out: Vec<TorusDivisor> = Vec::new();
    if let Some(a) = ClassSpace::new(fan).ok().and_then(|s| s.ample_class()) {
        let den = a.coeffs.iter().fold(Int::from(1), |acc, c| acc.lcm(c.denom()));
        out.push(a.scale(&Rat::from_integer(den)));
    }
    for _ in 0..400 {
        if out.len() >= count {
            break;
        }
        let c: Vec<i64> = (0..fan.num_rays()).map(|_| rng.gen_range(0..=3)).collect();
        let d = TorusDivisor::from_ints(&c);
        if divisor::is_cartier(fan, &d)
            && divisor::is_ample(fan, &d).unwrap_or(false)
            && !out.contains(&d)
        {
            out.push(d);
        }
    }
    out
}

/// Face fans of small 3-polytopes with non-simplicial facets.
pub fn non_simplicial_bases() -> Vec<NamedFan> {
    let prism = Fan::from_arrays(
        3,
        &[&[1, 0, 1], &[0, 1, 1], &[-1, -1, 1], &[1, 0, -1], &[0, 1, -1], &[-1, -1, -1]],
        &[&[0, 1, 2], &[3, 4, 5], &[0, 1, 3, 4], &[1, 2, 4, 5], &[0, 2, 3, 5]],
    )
    .expect("prism");
    let pyramid = Fan::from_arrays(
        3,
        &[&[0, 0, 1], &[1, 0, -1], &[0, 1, -1], &[-1, 0, -1], &[0, -1, -1]],
        &[&[1, 2, 3, 4], &[0, 1, 2], &[0, 2, 3], &[0, 3, 4], &[0, 4, 1]],
    )
    .expect("pyramid");
    vec![
        named("cube", cube_face_fan()),
        named("prism", prism),
        named("pyramid", pyramid),
    ]
}

fn random_unimodular(n: usize, rng: &mut impl Rng) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..4 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        // row_i += k row_j
        for c in 0..n {
            let v = m.get(i, c) + m.get(j, c) * k;
            m.set(i, c, v);
        }
    }
    m
}

pub fn transform(fan: &Fan, m: &IntMatrix) -> Fan {
    let rays = fan
        .rays()
        .iter()
        .map(|u| IntVector::from_big(&m.mul_vec(&u.to_big())).expect("small coordinates"))
        .collect();
    Fan::new(fan.dim(), rays, fan.cones().to_vec()).expect("image fan")
}

/// Random complete non-simplicial projective fans.
pub fn non_simplicial_corpus(count: usize) -> Vec<NamedFan> {
    let mut rng = rng(4);
    let bases = non_simplicial_bases();
    let mut out = Vec::new();
    while out.len() < count {
        let b = bases.choose(&mut rng).unwrap();
        let mut f = transform(&b.fan, &random_unimodular(3, &mut rng));
        if rng.gen_bool(0.5) {
            if let Some(g) = random_blowup(&f, &mut rng, true) {
                f = g;
            }
        }
        if !f.is_simplicial() && f.rays().iter().all(|u| u.max_abs() <= 6) {
            out.push(named(&format!("{}#{}", b.name, out.len()), f));
        }
    }
    out
}
