//! Finite matrix groups over prime fields acting on their natural module.

mod matrix;

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::number_theory::gcd;

pub use matrix::{Matrix, PrimeField};

pub const DEFAULT_GROUP_CAP: usize = 2_000_000;
pub const DEFAULT_VECTOR_CAP: usize = 1_000_000;

/// A matrix group given by generators, together with its full element list.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixGroupInstance {
    pub p: u64,
    pub dim: usize,
    pub order: usize,
    pub generators: Vec<Matrix>,
    #[serde(skip)]
    field: PrimeField,
    #[serde(skip)]
    elements: Vec<Matrix>,
    #[serde(skip)]
    lookup: HashSet<Matrix>,
}

/// Subgroup grown by right multiplication with generators.
struct Closure {
    gens: Vec<Matrix>,
    elements: Vec<Matrix>,
    lookup: HashSet<Matrix>,
}

impl Closure {
    fn trivial(dim: usize) -> Self {
        let id = Matrix::identity(dim);
        Closure {
            gens: Vec::new(),
            elements: vec![id.clone()],
            lookup: HashSet::from([id]),
        }
    }

    fn add_generator(&mut self, g: Matrix, field: PrimeField, cap: usize) -> Result<()> {
        if self.lookup.contains(&g) {
            return Ok(());
        }
        self.gens.push(g);
        let mut queue: VecDeque<usize> = (0..self.elements.len()).collect();
        let old = self.elements.len();
        while let Some(i) = queue.pop_front() {
            let from = if i < old { self.gens.len() - 1 } else { 0 };
            for k in from..self.gens.len() {
                let y = self.elements[i].mul(&self.gens[k], field);
                if !self.lookup.contains(&y) {
                    if self.elements.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    self.lookup.insert(y.clone());
                    self.elements.push(y);
                    queue.push_back(self.elements.len() - 1);
                }
            }
        }
        Ok(())
    }
}

/// Breadth-first closure of `generators` inside `GL(dim, p)`.
pub fn close_group(
    p: u64,
    dim: usize,
    generators: Vec<Matrix>,
    cap: usize,
) -> Result<MatrixGroupInstance> {
    let field = PrimeField::new(p)?;
    if dim == 0 || cap == 0 {
        return Err(Error::InvalidArgument("dimension and cap must be positive".into()));
    }
    for (i, g) in generators.iter().enumerate() {
        if g.dim() != dim {
            return Err(Error::InvalidArgument(format!(
                "generator {i} is {0}x{0}, expected {dim}x{dim}",
                g.dim()
            )));
        }
        if !g.is_invertible(field) {
            return Err(Error::SingularGenerator(i));
        }
    }
    let mut c = Closure::trivial(dim);
    for g in &generators {
        c.add_generator(g.clone(), field, cap)?;
    }
    Ok(MatrixGroupInstance {
        p,
        dim,
        order: c.elements.len(),
        generators,
        field,
        elements: c.elements,
        lookup: c.lookup,
    })
}

impl MatrixGroupInstance {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.lookup.contains(m)
    }

    pub fn vector_count(&self) -> u128 {
        (self.p as u128).pow(self.dim as u32)
    }
}

fn commutator(a: &Matrix, b: &Matrix, field: PrimeField) -> Matrix {
    let ai = a.inverse(field).expect("group elements are invertible");
    let bi = b.inverse(field).expect("group elements are invertible");
    ai.mul(&bi, field).mul(a, field).mul(b, field)
}

/// The derived subgroup, as the normal closure of generator commutators.
pub fn derived_subgroup(g: &MatrixGroupInstance) -> Vec<Matrix> {
    let field = g.field;
    let cap = g.order;
    let mut h = Closure::trivial(g.dim);
    for a in &g.generators {
        for b in &g.generators {
            h.add_generator(commutator(a, b, field), field, cap)
                .expect("subgroup of a finite group");
        }
    }
    let conj: Vec<(Matrix, Matrix)> = g
        .generators
        .iter()
        .map(|x| (x.inverse(field).expect("invertible"), x.clone()))
        .collect();
    let mut i = 0;
    while i < h.gens.len() {
        let c = h.gens[i].clone();
        for (xi, x) in &conj {
            let y = xi.mul(&c, field).mul(x, field);
            h.add_generator(y, field, cap).expect("subgroup of a finite group");
        }
        i += 1;
    }
    let mut out = h.elements;
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    CoprimeMaschke,
    IrreducibleSpin,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub p: u64,
    pub dim: usize,
    pub group_order: usize,
    /// Ascending, zero orbit included.
    pub orbit_sizes: Vec<usize>,
    pub max_orbit: usize,
    pub derived_order: usize,
    pub abelianization: usize,
    pub admissibility: Admissibility,
}

fn check_vector_cap(g: &MatrixGroupInstance, cap: usize) -> Result<usize> {
    let size = g.vector_count();
    if size > cap as u128 {
        return Err(Error::VectorCapExceeded { size, cap });
    }
    Ok(size as usize)
}

fn decode(mut index: usize, p: usize, dim: usize) -> Vec<u8> {
    (0..dim)
        .map(|_| {
            let d = (index % p) as u8;
            index /= p;
            d
        })
        .collect()
}

fn encode(v: &[u8], p: usize) -> usize {
    v.iter().rev().fold(0, |acc, &d| acc * p + d as usize)
}

/// Orbits on the natural module, each given by its smallest vector index
/// and size, in index order.
fn orbit_partition(g: &MatrixGroupInstance, cap: usize) -> Result<Vec<(usize, usize)>> {
    let total = check_vector_cap(g, cap)?;
    let p = g.p as usize;
    let mut seen = vec![false; total];
    let mut out = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let v = decode(i, p, g.dim);
            for x in &g.generators {
                let j = encode(&x.apply(&v, g.field), p);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        out.push((start, size));
    }
    Ok(out)
}

/// Smallest invariant subspace containing `v`, as an echelon basis.
pub fn spin(g: &MatrixGroupInstance, v: &[u8]) -> Vec<Vec<u8>> {
    let field = g.field;
    let mut basis = matrix::echelon(field, g.dim, vec![v.to_vec()]);
    loop {
        let mut rows = basis.clone();
        for w in &basis {
            for x in &g.generators {
                rows.push(x.apply(w, field));
            }
        }
        let next = matrix::echelon(field, g.dim, rows);
        if next.len() == basis.len() {
            return basis;
        }
        basis = next;
    }
}

fn admissibility_from(g: &MatrixGroupInstance, orbits: &[(usize, usize)]) -> Admissibility {
    if gcd(g.order as u128, g.p as u128) == 1 {
        return Admissibility::CoprimeMaschke;
    }
    let p = g.p as usize;
    let irreducible = orbits
        .iter()
        .filter(|&&(rep, _)| rep != 0)
        .all(|&(rep, _)| spin(g, &decode(rep, p, g.dim)).len() == g.dim);
    if irreducible {
        Admissibility::IrreducibleSpin
    } else {
        Admissibility::Rejected
    }
}

/// Complete reducibility certified by coprimality or by spinning every
/// nonzero vector up to the whole module.
pub fn admissibility(g: &MatrixGroupInstance, vector_cap: usize) -> Result<Admissibility> {
    if gcd(g.order as u128, g.p as u128) == 1 {
        return Ok(Admissibility::CoprimeMaschke);
    }
    Ok(admissibility_from(g, &orbit_partition(g, vector_cap)?))
}

pub fn orbits(g: &MatrixGroupInstance, vector_cap: usize) -> Result<OrbitReport> {
    let parts = orbit_partition(g, vector_cap)?;
    let mut orbit_sizes: Vec<usize> = parts.iter().map(|&(_, s)| s).collect();
    orbit_sizes.sort_unstable();
    let derived_order = derived_subgroup(g).len();
    Ok(OrbitReport {
        p: g.p,
        dim: g.dim,
        group_order: g.order,
        max_orbit: orbit_sizes.last().copied().unwrap_or(0),
        orbit_sizes,
        derived_order,
        abelianization: g.order / derived_order,
        admissibility: admissibility_from(g, &parts),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundVerdict {
    pub report: OrbitReport,
    pub vector_count: u128,
    /// `|G/G'| <= M`.
    pub within_max_orbit: bool,
    /// `|G/G'| < p^dim`.
    pub below_module_size: bool,
    pub tight: bool,
}

pub fn verify_orbit_bound(g: &MatrixGroupInstance, vector_cap: usize) -> Result<BoundVerdict> {
    let report = orbits(g, vector_cap)?;
    if report.admissibility == Admissibility::Rejected {
        return Err(Error::AdmissibilityRejected);
    }
    let vector_count = g.vector_count();
    let k = report.abelianization;
    let verdict = BoundVerdict {
        within_max_orbit: k <= report.max_orbit,
        below_module_size: (k as u128) < vector_count,
        tight: k == report.max_orbit,
        report,
        vector_count,
    };
    if !verdict.within_max_orbit || !verdict.below_module_size {
        return Err(Error::BoundViolated(format!(
            "|G/G'| = {k}, M = {}, |V| = {vector_count}, p = {}, dim = {}",
            verdict.report.max_orbit, g.p, g.dim
        )));
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Serialize)]
pub struct Corpus {
    pub seed: u64,
    pub instances: Vec<MatrixGroupInstance>,
    pub attempts: usize,
    pub skipped_cap: usize,
    pub skipped_rejected: usize,
}

fn random_invertible(rng: &mut ChaCha8Rng, field: PrimeField, dim: usize) -> Matrix {
    let p = field.p() as i64;
    loop {
        let entries: Vec<i64> = (0..dim * dim).map(|_| rng.gen_range(0..p)).collect();
        let m = Matrix::from_entries(field, dim, &entries).expect("square");
        if m.is_invertible(field) {
            return m;
        }
    }
}

/// Seeded corpus of admissible instances. Candidates whose closure passes
/// `cap` or whose module is not certified completely reducible are skipped;
/// gives up after `200 * count` candidates.
pub fn random_instances(
    seed: u64,
    count: usize,
    p_set: &[u64],
    dim_max: usize,
    cap: usize,
    vector_cap: usize,
) -> Result<Corpus> {
    if count > 0 && (p_set.is_empty() || dim_max == 0) {
        return Err(Error::InvalidArgument(
            "need a nonempty prime set and dim_max >= 1".into(),
        ));
    }
    let fields = p_set
        .iter()
        .map(|&p| PrimeField::new(p))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Corpus {
        seed,
        instances: Vec::new(),
        attempts: 0,
        skipped_cap: 0,
        skipped_rejected: 0,
    };
    while corpus.instances.len() < count && corpus.attempts < 200 * count {
        corpus.attempts += 1;
        let field = fields[rng.gen_range(0..fields.len())];
        let dim = rng.gen_range(1..=dim_max);
        let ngens = rng.gen_range(1..=2);
        let gens: Vec<Matrix> = (0..ngens)
            .map(|_| random_invertible(&mut rng, field, dim))
            .collect();
        let g = match close_group(field.p(), dim, gens, cap) {
            Ok(g) => g,
            Err(Error::CapExceeded(_)) => {
                corpus.skipped_cap += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match admissibility(&g, vector_cap) {
            Ok(Admissibility::Rejected) | Err(Error::VectorCapExceeded { .. }) => {
                corpus.skipped_rejected += 1;
            }
            Ok(_) => corpus.instances.push(g),
            Err(e) => return Err(e),
        }
    }
    Ok(corpus)
}

/// `verify_orbit_bound` over many instances in parallel, in input order.
pub fn verify_all(instances: &[MatrixGroupInstance], vector_cap: usize) -> Vec<Result<BoundVerdict>> {
    instances
        .par_iter()
        .map(|g| verify_orbit_bound(g, vector_cap))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Fixture {
    pub name: String,
    pub instance: MatrixGroupInstance,
}

fn fixture(name: &str, p: u64, dim: usize, gens: &[&[i64]]) -> Fixture {
    let field = PrimeField::new(p).expect("fixture prime");
    let gens = gens
        .iter()
        .map(|e| Matrix::from_entries(field, dim, e).expect("fixture matrix"))
        .collect();
    Fixture {
        name: name.to_string(),
        instance: close_group(p, dim, gens, DEFAULT_GROUP_CAP).expect("fixture closes"),
    }
}

/// SL(2,3), GL(2,2) and the full scalar groups of GF(5), GF(7), GF(13).
pub fn fixtures() -> Vec<Fixture> {
    vec![
        fixture("SL(2,3)", 3, 2, &[&[1, 1, 0, 1], &[0, 2, 1, 0]]),
        fixture("GL(2,2)", 2, 2, &[&[0, 1, 1, 0], &[1, 1, 0, 1]]),
        fixture("GF(5)*", 5, 1, &[&[2]]),
        fixture("GF(7)*", 7, 1, &[&[3]]),
        fixture("GF(13)*", 13, 1, &[&[2]]),
    ]
}
