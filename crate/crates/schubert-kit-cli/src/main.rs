//! Command-line frontend: every library operation behind one subcommand,
//! with deterministic JSON (default) or TSV output and exact integers.

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::Value;

use schubert_kit::demazure::{
    demazure_cell_counts, demazure_point_count, schubert_point_count, DemazureWord,
};
use schubert_kit::lattice::{
    closure_point_count, enumerate_lattices, stratum_of, stratum_point_count, tangent_dim,
    Lattice2,
};
use schubert_kit::root_datum::{build, pi1, GroupSpec, RootDatum};
use schubert_kit::series::SeriesRing;
use schubert_kit::weyl::{
    affine_coxeter, bruhat_leq, min_coset_rep, omega_group, parse_word, CoxeterSystem,
    ParahoricType,
};
use schubert_kit::witness::{
    class_mod_pk, ind_flat_locus, reducedness_oracle, IndFlatLocus, NonReducedCause,
    Reducedness, WitnessClass,
};
use schubert_kit::{KitError, Result};

const SCHEMA: &str = include_str!("../assets/schema.json");
const DEFAULT_MAX_BALL: u64 = 12;

#[derive(Parser)]
#[command(
    name = "schubert-kit",
    version,
    about = "Exact combinatorics of affine flag varieties: point counts, \
             fundamental groups, and non-reducedness witnesses"
)]
struct Cli {
    /// Print the JSON schema for all outputs and exit.
    #[arg(long = "json-schema")]
    json_schema: bool,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fundamental group X_*/Q^vee of a group specification.
    Pi1 {
        /// Group specification, e.g. "A2:adjoint" or "A1:sc x T1".
        group: String,
    },
    /// The length-zero subgroup of the Iwahori-Weyl group.
    Omega {
        group: String,
    },
    /// Reducedness of the affine flag variety over F_p.
    ReducedLocus {
        group: String,
        /// Prime characteristic to test.
        #[arg(long)]
        prime: u64,
    },
    /// Primes that must be inverted for ind-flatness over the integers.
    IndFlatLocus {
        group: String,
    },
    /// Compare two affine Weyl group elements in Bruhat order.
    Bruhat {
        #[arg(long)]
        group: String,
        /// Left word, space-separated generator indices, e.g. "0 1".
        #[arg(long)]
        lhs: String,
        /// Right word.
        #[arg(long)]
        rhs: String,
    },
    /// Minimal representative of a right parahoric coset.
    Coset {
        #[arg(long)]
        group: String,
        #[arg(long)]
        word: String,
        /// Parahoric generator indices, e.g. "1" or "0 2".
        #[arg(long)]
        parahoric: String,
    },
    /// Point count and cell decomposition of a Demazure resolution.
    DemazureCount {
        #[arg(long)]
        group: String,
        /// Reduced word of the resolution.
        #[arg(long)]
        word: String,
        #[arg(long)]
        q: u64,
    },
    /// F_q-points of a Schubert variety in a partial affine flag variety.
    SchubertCount {
        #[arg(long)]
        group: String,
        /// Minimal coset representative word.
        #[arg(long, conflicts_with = "length")]
        word: Option<String>,
        /// Pick the unique minimal representative of this length instead.
        #[arg(long)]
        length: Option<u64>,
        /// Parahoric generator indices; defaults to all finite nodes.
        #[arg(long)]
        parahoric: Option<String>,
        #[arg(long)]
        q: u64,
    },
    /// Stratum and closure point counts of the rank-2 lattice model.
    LatticeTable {
        #[arg(long)]
        q: u64,
        /// Truncation window N.
        #[arg(long = "N", allow_negative_numbers = true)]
        window: i64,
        /// Emit tab-separated rows instead of JSON.
        #[arg(long)]
        tsv: bool,
    },
    /// Tangent dimensions of the determinantal stratum model.
    Tangent {
        #[arg(long)]
        q: u64,
        /// Ambient stratum index n.
        #[arg(long)]
        length: u64,
        /// Truncation window; defaults to the smallest one holding S_n.
        #[arg(long = "N", allow_negative_numbers = true)]
        window: Option<i64>,
        /// Evaluate every point of the closure.
        #[arg(long, conflicts_with_all = ["a", "b", "f"])]
        all: bool,
        /// Diagonal exponent of the first generator (z^a, 0).
        #[arg(long, requires = "b", allow_negative_numbers = true)]
        a: Option<i64>,
        /// Diagonal exponent of the second generator (f, z^b).
        #[arg(long, requires = "a", allow_negative_numbers = true)]
        b: Option<i64>,
        /// Off-diagonal series literal, e.g. "z^-1+1"; defaults to 0.
        #[arg(long)]
        f: Option<String>,
    },
    /// Class of a unit series modulo p^k-th powers and integral units.
    WitnessClass {
        #[arg(long)]
        q: u64,
        /// Power of the residue characteristic defining the modulus p^k.
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Series literal over F_q[e], e.g. "1+e*z^-1".
        #[arg(long)]
        series: String,
    },
    /// Run the full verification suite and print the pass/fail matrix.
    Verify {
        /// Emit tab-separated rows instead of JSON.
        #[arg(long)]
        tsv: bool,
    },
}

#[derive(Serialize)]
struct Pi1Out {
    invariant_factors: Vec<u64>,
    free_rank: usize,
}

#[derive(Serialize)]
struct OmegaElementOut {
    translation: Vec<i64>,
    class: Vec<u64>,
}

#[derive(Serialize)]
struct OmegaOut {
    invariant_factors: Vec<u64>,
    order: usize,
    elements: Vec<OmegaElementOut>,
}

#[derive(Serialize)]
struct ReducedOut {
    reduced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    prime: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    class: Option<WitnessClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cause: Option<String>,
}

#[derive(Serialize)]
struct IndFlatOut {
    known: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    excluded_primes: Option<Vec<u64>>,
}

#[derive(Serialize)]
struct BruhatOut {
    lhs: Vec<usize>,
    rhs: Vec<usize>,
    leq: bool,
}

#[derive(Serialize)]
struct CosetOut {
    word: Vec<usize>,
    parahoric: Vec<usize>,
    minimal_representative: Vec<usize>,
    length: usize,
}

#[derive(Serialize)]
struct CellOut {
    word: Vec<usize>,
    length: u64,
    total: Value,
    fiber: Value,
}

#[derive(Serialize)]
struct DemazureOut {
    word: Vec<usize>,
    q: u64,
    total: Value,
    cells: Vec<CellOut>,
}

#[derive(Serialize)]
struct SchubertOut {
    word: Vec<usize>,
    parahoric: Vec<usize>,
    q: u64,
    count: Value,
}

#[derive(Serialize)]
struct LatticeRowOut {
    n: u64,
    stratum_points: Value,
    closure_points: Value,
    demazure_count: Value,
    matches: bool,
}

#[derive(Serialize)]
struct LatticeOut {
    q: u64,
    window: i64,
    rows: Vec<LatticeRowOut>,
}

#[derive(Serialize)]
struct TangentPointOut {
    a: i64,
    b: i64,
    f: String,
    stratum: u64,
    tangent_dim: usize,
}

#[derive(Serialize)]
struct TangentOut {
    q: u64,
    window: i64,
    n: u64,
    points: Vec<TangentPointOut>,
}

#[derive(Serialize)]
struct WitnessOut {
    #[serde(flatten)]
    class: WitnessClass,
    trivial: bool,
}

#[derive(Serialize)]
struct CriterionOut {
    index: usize,
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyOut {
    criteria: Vec<CriterionOut>,
    all_passed: bool,
}

#[derive(Serialize)]
struct ErrOut {
    error: String,
    kind: &'static str,
}

/// Exact integer as JSON: a number up to 2^53−1, a decimal string above.
fn big_value(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) if v < (1u64 << 53) => Value::from(v),
        _ => Value::from(n.to_string()),
    }
}

fn u128_value(n: u128) -> Value {
    big_value(&BigUint::from(n))
}

fn emit<T: Serialize>(out: &T) {
    println!("{}", serde_json::to_string(out).expect("output serializes"));
}

fn datum(text: &str) -> Result<RootDatum> {
    build(&GroupSpec::parse(text)?)
}

fn system(text: &str) -> Result<CoxeterSystem> {
    affine_coxeter(&datum(text)?)
}

fn max_ball() -> u64 {
    std::env::var("SCHUBERT_KIT_MAX_BALL")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_BALL)
}

/// The unique minimal coset representative of the given length, found by
/// ball enumeration (radius capped by SCHUBERT_KIT_MAX_BALL).
fn unique_min_rep(cs: &CoxeterSystem, j: &ParahoricType, length: u64) -> Result<Vec<usize>> {
    let cap = max_ball();
    if length > cap {
        return Err(KitError::BoundExceeded(format!(
            "length {length} exceeds the ball cutoff {cap}; raise SCHUBERT_KIT_MAX_BALL"
        )));
    }
    let mut found = Vec::new();
    for x in cs.ball(length as usize)? {
        if cs.length(&x) != length {
            continue;
        }
        let word = cs.canonical_word(&x)?;
        if min_coset_rep(cs, &word, j)? == word {
            found.push(word);
        }
    }
    match found.len() {
        0 => Err(KitError::InvalidInput(format!(
            "no minimal coset representative of length {length}"
        ))),
        1 => Ok(found.remove(0)),
        n => Err(KitError::InvalidInput(format!(
            "--length {length} is ambiguous: {n} minimal representatives"
        ))),
    }
}

/// Grassmannian comparison word for the lattice table: length-n minimal
/// representative in affine A₁, ending in the affine generator.
fn grassmannian_word(n: usize) -> Vec<usize> {
    (0..n).map(|i| (n - 1 - i) % 2).collect()
}

fn finite_nodes(cs: &CoxeterSystem) -> Vec<usize> {
    (0..cs.num_generators())
        .filter(|&i| !cs.is_affine_generator(i))
        .collect()
}

fn run_command(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Pi1 { group } => {
            let g = pi1(&datum(&group)?);
            emit(&Pi1Out {
                invariant_factors: g.invariant_factors,
                free_rank: g.free_rank,
            });
        }
        Cmd::Omega { group } => {
            let rd = datum(&group)?;
            let cs = affine_coxeter(&rd)?;
            let om = omega_group(&cs)?;
            let g = pi1(&rd);
            let mut elements: Vec<OmegaElementOut> = om
                .elements
                .iter()
                .zip(&om.classes)
                .map(|(gamma, class)| OmegaElementOut {
                    translation: gamma.element().translation_part().to_vec(),
                    class: class.clone(),
                })
                .collect();
            elements.sort_by(|x, y| x.class.cmp(&y.class));
            emit(&OmegaOut {
                invariant_factors: g.invariant_factors,
                order: elements.len(),
                elements,
            });
        }
        Cmd::ReducedLocus { group, prime } => {
            let out = match reducedness_oracle(&datum(&group)?, prime)? {
                Reducedness::Reduced => ReducedOut {
                    reduced: true,
                    witness: None,
                    prime,
                    exponent: None,
                    class: None,
                    cause: None,
                },
                Reducedness::NonReduced(NonReducedCause::TorsionPrime {
                    p,
                    k,
                    witness,
                    class,
                }) => ReducedOut {
                    reduced: false,
                    witness: Some(witness),
                    prime: p,
                    exponent: Some(k),
                    class: Some(class),
                    cause: None,
                },
                Reducedness::NonReduced(NonReducedCause::NotSemisimple) => ReducedOut {
                    reduced: false,
                    witness: None,
                    prime,
                    exponent: None,
                    class: None,
                    cause: Some("not-semisimple".into()),
                },
            };
            emit(&out);
        }
        Cmd::IndFlatLocus { group } => {
            let out = match ind_flat_locus(&datum(&group)?) {
                IndFlatLocus::ExcludedPrimes(v) => IndFlatOut {
                    known: true,
                    excluded_primes: Some(v),
                },
                IndFlatLocus::Unknown => IndFlatOut { known: false, excluded_primes: None },
            };
            emit(&out);
        }
        Cmd::Bruhat { group, lhs, rhs } => {
            let cs = system(&group)?;
            let lhs = parse_word(&lhs)?;
            let rhs = parse_word(&rhs)?;
            let leq = bruhat_leq(&cs, &lhs, &rhs)?;
            emit(&BruhatOut { lhs, rhs, leq });
        }
        Cmd::Coset { group, word, parahoric } => {
            let cs = system(&group)?;
            let word = parse_word(&word)?;
            let indices = parse_word(&parahoric)?;
            let j = ParahoricType::new(&cs, indices)?;
            let minimal = min_coset_rep(&cs, &word, &j)?;
            emit(&CosetOut {
                word,
                parahoric: j.indices().to_vec(),
                length: minimal.len(),
                minimal_representative: minimal,
            });
        }
        Cmd::DemazureCount { group, word, q } => {
            let cs = system(&group)?;
            let word = parse_word(&word)?;
            let dw = DemazureWord::new(&cs, &word)?;
            let total = demazure_point_count(&dw, q)?;
            let cells = demazure_cell_counts(&cs, &dw, q)?
                .into_iter()
                .map(|c| CellOut {
                    word: c.word,
                    length: c.length,
                    total: big_value(&c.total),
                    fiber: big_value(&c.fiber),
                })
                .collect();
            emit(&DemazureOut { word, q, total: big_value(&total), cells });
        }
        Cmd::SchubertCount { group, word, length, parahoric, q } => {
            let cs = system(&group)?;
            let j = match parahoric {
                Some(text) => ParahoricType::new(&cs, parse_word(&text)?)?,
                None => ParahoricType::new(&cs, finite_nodes(&cs))?,
            };
            let word = match (word, length) {
                (Some(text), None) => parse_word(&text)?,
                (None, Some(n)) => unique_min_rep(&cs, &j, n)?,
                _ => {
                    return Err(KitError::InvalidInput(
                        "pass exactly one of --word or --length".into(),
                    ))
                }
            };
            let count = schubert_point_count(&cs, &word, &j, q)?;
            emit(&SchubertOut {
                word,
                parahoric: j.indices().to_vec(),
                q,
                count: big_value(&count),
            });
        }
        Cmd::LatticeTable { q, window, tsv } => {
            let cs = system("A1:sc")?;
            let j = ParahoricType::new(&cs, vec![1])?;
            let mut rows = Vec::new();
            for n in 0..=(2 * window) as u64 {
                let stratum = stratum_point_count(q, window, n)?;
                let closure = closure_point_count(q, window, n)?;
                let demazure = schubert_point_count(&cs, &grassmannian_word(n as usize), &j, q)?;
                let matches = BigUint::from(closure) == demazure;
                rows.push(LatticeRowOut {
                    n,
                    stratum_points: u128_value(stratum),
                    closure_points: u128_value(closure),
                    demazure_count: big_value(&demazure),
                    matches,
                });
            }
            if tsv {
                println!("n\tstratum_points\tclosure_points\tdemazure_check");
                for r in &rows {
                    let check = if r.matches {
                        "ok".to_string()
                    } else {
                        format!("mismatch:{}", r.demazure_count)
                    };
                    println!(
                        "{}\t{}\t{}\t{check}",
                        r.n, r.stratum_points, r.closure_points
                    );
                }
            } else {
                emit(&LatticeOut { q, window, rows });
            }
        }
        Cmd::Tangent { q, length, window, all, a, b, f } => {
            let n = length;
            let window = window.unwrap_or_else(|| (n.div_ceil(2)).max(1) as i64);
            let ring = SeriesRing::new(q)?;
            let lattices: Vec<Lattice2> = if all {
                enumerate_lattices(q, window, (n % 2) as i64)?
                    .into_iter()
                    .filter(|l| stratum_of(l).n <= n)
                    .collect()
            } else {
                let (Some(a), Some(b)) = (a, b) else {
                    return Err(KitError::InvalidInput(
                        "pass --all, or both --a and --b (with optional --f)".into(),
                    ));
                };
                let terms = match f {
                    None => Vec::new(),
                    Some(text) => {
                        let series = ring.parse(&text)?;
                        if !series.is_exact() || !ring.eps_part(&series).is_exact_zero() {
                            return Err(KitError::InvalidInput(
                                "--f must be an exact series over F_q".into(),
                            ));
                        }
                        series.terms().map(|(e, c)| (e, c.a)).collect()
                    }
                };
                vec![Lattice2::new(q, window, a, b, &terms)?]
            };
            let mut points = Vec::new();
            for l in &lattices {
                let f_series = l.to_basis(&ring)[0][1].clone();
                points.push(TangentPointOut {
                    a: l.a(),
                    b: l.b(),
                    f: ring.format(&f_series),
                    stratum: stratum_of(l).n,
                    tangent_dim: tangent_dim(l, n)?,
                });
            }
            emit(&TangentOut { q, window, n, points });
        }
        Cmd::WitnessClass { q, k, series } => {
            let ring = SeriesRing::new(q)?;
            let f = ring.parse(&series)?;
            let class = class_mod_pk(&ring, &f, k)?;
            let trivial = class.is_trivial();
            emit(&WitnessOut { class, trivial });
        }
        Cmd::Verify { tsv } => {
            let results = schubert_kit::acceptance::run_all();
            let all_passed = results.iter().all(|r| r.passed);
            if tsv {
                println!("index\tname\tresult\tdetail");
                for r in &results {
                    let status = if r.passed { "PASS" } else { "FAIL" };
                    println!("{}\t{}\t{status}\t{}", r.index, r.name, r.detail);
                }
            } else {
                emit(&VerifyOut {
                    criteria: results
                        .iter()
                        .map(|r| CriterionOut {
                            index: r.index,
                            name: r.name.to_string(),
                            passed: r.passed,
                            detail: r.detail.clone(),
                        })
                        .collect(),
                    all_passed,
                });
            }
            return Ok(if all_passed { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn error_kind(err: &KitError) -> (&'static str, i32) {
    match err {
        KitError::InvalidSpec(_) => ("invalid-spec", 1),
        KitError::InvalidInput(_) => ("invalid-input", 1),
        KitError::BoundExceeded(_) => ("bound-exceeded", 2),
        KitError::Precision(_) => ("precision", 2),
        KitError::NotSemisimple(_) => ("not-semisimple", 2),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(1);
                }
            }
        }
    };
    if cli.json_schema {
        print!("{SCHEMA}");
        std::process::exit(0);
    }
    let Some(cmd) = cli.command else {
        eprintln!(
            "{}",
            serde_json::to_string(&ErrOut {
                error: "a subcommand is required; see --help".into(),
                kind: "invalid-input",
            })
            .expect("error serializes")
        );
        std::process::exit(1);
    };
    match run_command(cmd) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            let (kind, code) = error_kind(&err);
            eprintln!(
                "{}",
                serde_json::to_string(&ErrOut { error: err.to_string(), kind })
                    .expect("error serializes")
            );
            std::process::exit(code);
        }
    }
}
