use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cubic_brauer::descent::{self, EtaleData};
use cubic_brauer::fpgeom::{self, forms, CubicForm};
use cubic_brauer::galcoh;
use cubic_brauer::lines27::{Configuration, DecompositionKind, SchlafliType};
use cubic_brauer::locsym::{self, LocalSymbols, RepresentingFunction, Third};
use cubic_brauer::permgrp::{Perm, PermGroup};
use cubic_brauer::ptsearch::{self, HeightBound};
use cubic_brauer::suite::{self, SuiteConfig};
use cubic_brauer::weylact::{self, named, SubgroupTag};

#[derive(Parser)]
#[command(name = "cubic-brauer", version, about = "Lines, Brauer groups and rational points of cubic surfaces")]
struct Cli {
    /// worker threads for parallel sections (default: all cores)
    #[arg(long, global = true)]
    parallel: Option<usize>,
    /// seed for randomized steps
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Counts of the configuration of the 27 lines
    Census {
        /// lines, tritangent_planes, steiner_pairs, double_sixes, sixers,
        /// decompositions, triplets or enneahedra
        #[arg(long)]
        object: Option<String>,
        /// I/II/III for steiner_pairs, two_triples/three_pairs for
        /// decompositions, first/second for enneahedra
        #[arg(long = "type")]
        kind: Option<String>,
    },
    /// H^1(G, Pic) for a subgroup of W(E6)
    H1(GroupArgs),
    /// Class map of two invariant triplets
    Classmap {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "St_(123)(456)")]
        d1: String,
        #[arg(long, default_value = "St_(14)(25)(36)")]
        d2: String,
    },
    /// Auxiliary polynomial and descent model of etale data
    Descent {
        /// JSON file, or example1..example4
        #[arg(long)]
        data: String,
        /// also build the model and find its 27 lines
        #[arg(long)]
        lines: bool,
    },
    /// Reduction of a cubic form modulo p
    FpReport {
        /// JSON file of 20 coefficients, or example1..example4, cassels_guy
        #[arg(long)]
        form: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        kmax: u32,
    },
    /// Rational points up to a height bound
    Search {
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 100)]
        height: u64,
        /// search to the long-run height instead of --height
        #[arg(long)]
        extended: bool,
        /// cross-check against the naive enumeration
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Local evaluation of a cyclic algebra at a rational point
    Evaluate {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        psi: String,
        /// "x:y:z:w"
        #[arg(long)]
        point: String,
        /// comma-separated primes; defaults to the support of Ψ(x)
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Runs the acceptance checks
    PaperSuite {
        /// only criteria of this module
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        extended: bool,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// U_t, U_tt, U_tt_prime, U_t3sylow, D18_first_kind, stab_pair, trivial, weyl
    #[arg(long, conflicts_with = "generators")]
    named: Option<String>,
    /// JSON file: list of permutations, each the 27 images of the lines
    #[arg(long)]
    generators: Option<String>,
}

fn read_input(arg: &str) -> Result<String> {
    std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

fn load_form(arg: &str) -> Result<CubicForm> {
    let builtin = match arg {
        "example1" => Some(forms::example1()),
        "example2" => Some(forms::example2()),
        "example3" => Some(forms::example3()),
        "example4" => Some(forms::example4()),
        "cassels_guy" => Some(forms::cassels_guy()),
        _ => None,
    };
    match builtin {
        Some(f) if !Path::new(arg).exists() => Ok(f),
        _ => Ok(CubicForm::from_json(&read_input(arg)?)?),
    }
}

fn load_etale(arg: &str) -> Result<EtaleData> {
    use descent::examples::*;
    let builtin = match arg {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "example3" => Some(example3()),
        "example4" => Some(example4()),
        _ => None,
    };
    match builtin {
        Some(e) if !Path::new(arg).exists() => Ok(e),
        _ => Ok(EtaleData::from_json(&read_input(arg)?)?),
    }
}

fn load_group(a: &GroupArgs) -> Result<PermGroup> {
    match (&a.named, &a.generators) {
        (Some(n), _) => match n.as_str() {
            "trivial" | "identity" => Ok(PermGroup::trivial(27)),
            "weyl" | "W(E6)" => Ok(weylact::weyl().group().clone()),
            _ => Ok(named(n.parse::<SubgroupTag>()?).group.clone()),
        },
        (None, Some(path)) => {
            let images: Vec<Vec<usize>> = serde_json::from_str(&read_input(path)?).context("generator list")?;
            let mut gens = Vec::new();
            for (i, im) in images.into_iter().enumerate() {
                if im.len() != 27 {
                    bail!("generator {i} has {} images, expected 27", im.len());
                }
                let p = Perm::from_images(im).map_err(|e| anyhow!("generator {i}: {e}"))?;
                if !weylact::preserves_intersections(&p) {
                    bail!("generator {i} does not preserve the intersection pairing");
                }
                gens.push(p);
            }
            Ok(PermGroup::new(27, gens).map_err(|e| anyhow!("{e}"))?)
        }
        (None, None) => bail!("give --named or --generators"),
    }
}

fn census(object: Option<&str>, kind: Option<&str>) -> Result<(Value, bool)> {
    let cfg = Configuration::get();
    let Some(object) = object else {
        let mut v = suite::census_counts();
        v["weyl_order"] = json!(weylact::weyl().order());
        return Ok((v, true));
    };
    let count = match (object, kind) {
        ("lines", None) => 27,
        ("tritangent_planes", None) => cfg.tritangent_planes().len(),
        ("steiner_pairs", None) => cfg.steiner_pairs().len(),
        ("steiner_pairs", Some(t)) => {
            let t = match t {
                "I" => SchlafliType::I,
                "II" => SchlafliType::II,
                "III" => SchlafliType::III,
                _ => bail!("Steiner pair types are I, II, III"),
            };
            cfg.steiner_pairs().iter().filter(|p| p.schlafli_type() == t).count()
        }
        ("double_sixes", None) => cfg.double_sixes().len(),
        ("sixers", None) => cfg.sixers().len(),
        ("decompositions", None) => cfg.decompositions().len(),
        ("decompositions", Some(t)) => {
            let two = |d: &&cubic_brauer::lines27::Decomposition| d.kind == DecompositionKind::TwoTriples;
            match t {
                "two_triples" => cfg.decompositions().iter().filter(two).count(),
                "three_pairs" => cfg.decompositions().iter().filter(|d| !two(d)).count(),
                _ => bail!("decomposition kinds are two_triples, three_pairs"),
            }
        }
        ("triplets", None) => cfg.triplets().len(),
        ("enneahedra", None) => cfg.enneahedra().len(),
        ("enneahedra", Some(t)) => {
            let first = |e: &&cubic_brauer::lines27::Enneahedron| e.decompositions.len() == 4;
            match t {
                "first" => cfg.enneahedra().iter().filter(first).count(),
                "second" => cfg.enneahedra().iter().filter(|e| !first(e)).count(),
                _ => bail!("enneahedron kinds are first, second"),
            }
        }
        (o, Some(_)) => bail!("no types for {o}"),
        (o, None) => bail!("unknown object {o}"),
    };
    Ok((json!({ "object": object, "type": kind, "count": count }), true))
}

/// Classes of the invariant ordered triplets, one per rotation class.
fn class_table(g: &PermGroup, pres: &galcoh::H1Presentation) -> Result<Vec<Value>> {
    let cfg = Configuration::get();
    let inv = weylact::stabilized_objects(g).triplets;
    let mut cache = HashMap::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut rows = Vec::new();
    for t in inv {
        let tr = cfg.triplets()[t];
        let key = [tr, tr.rotate(), tr.rotate().rotate()].map(|x| cfg.triplet_index(&x).expect("triplet")).into_iter().min();
        if !seen.insert(key) {
            continue;
        }
        let c = galcoh::class_map(pres, t, &mut cache)?;
        let names: Vec<String> = tr.pairs.iter().map(|&p| cfg.steiner_pairs()[p].to_string()).collect();
        rows.push(json!({ "triplet": names, "class": c.values, "factors": c.factors }));
    }
    Ok(rows)
}

fn h1(args: &GroupArgs) -> Result<(Value, bool)> {
    let g = load_group(args)?;
    let report = galcoh::h1_report(&g)?;
    let pres = galcoh::h1(&g)?;
    let mut v = serde_json::to_value(&report)?;
    if !pres.structure.is_trivial() && !weylact::stabilized_objects(&g).triplets.is_empty() {
        v["class_map"] = json!(class_table(&g, &pres)?);
    }
    Ok((v, true))
}

fn classmap(args: &GroupArgs, d1: &str, d2: &str) -> Result<(Value, bool)> {
    let g = load_group(args)?;
    let cfg = Configuration::get();
    let (d1, d2) = (cfg.decomposition_by_name(d1)?, cfg.decomposition_by_name(d2)?);
    let r = galcoh::two_triplet_report(&g, d1, d2)?;
    let ok = r.ok();
    Ok((serde_json::to_value(&r)?, ok))
}

fn descent_cmd(data: &str, lines: bool) -> Result<(Value, bool)> {
    let e = load_etale(data)?;
    let aux = descent::auxiliary_polynomial(&e);
    let ty = descent::cubic_galois_type(&aux.poly);
    let mut v = json!({
        "auxiliary_polynomial": aux.to_string_var("V"),
        "galois_type": ty,
    });
    let mut ok = true;
    if lines {
        let s = descent::build_p5_model(&e)?;
        let r = descent::check_rationality(&s);
        let ml = descent::lines_of_model(&s)?;
        let c = descent::check_configuration(&ml);
        ok = r.rational && r.matches_symbolic && c.ok();
        v["field_degree"] = json!(s.field.degree());
        v["rationality"] = serde_json::to_value(&r)?;
        v["configuration"] = serde_json::to_value(&c)?;
        match descent::galois_summary(&ml) {
            Ok(g) => v["galois"] = serde_json::to_value(&g)?,
            Err(e) => v["galois"] = json!(e.to_string()),
        }
    }
    Ok((v, ok))
}

fn fp_report(form: &str, p: u64, kmax: u32) -> Result<(Value, bool)> {
    let f = load_form(form)?;
    let counts: BTreeMap<u32, u64> =
        (1..=kmax).map(|k| fpgeom::count_points(&f, p, k).map(|n| (k, n))).collect::<Result<_, _>>()?;
    let smooth = fpgeom::is_smooth_reduction(&f, p)?;
    let mut v = json!({
        "p": p,
        "points": counts,
        "smooth": smooth,
        "smooth_points": fpgeom::smooth_point_count(&f, p)?,
        "singular": fpgeom::singular_census(&f, p, kmax)?,
        "linear_factors": fpgeom::factor_into_planes(&f, p)?,
    });
    if smooth {
        v["frobenius_trace"] = json!(fpgeom::frobenius_trace(&f, p)?);
    }
    Ok((v, true))
}

fn search_cmd(form: &str, height: u64, extended: bool, oracle: bool, samples: usize) -> Result<(Value, bool)> {
    let f = load_form(form)?;
    let b = if extended { suite::EXTENDED_HEIGHT } else { height };
    let r = ptsearch::search(&f, HeightBound::new(b)?)?;
    let sample: Vec<String> =
        r.points.iter().take(samples).map(|x| x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")).collect();
    let mut v = json!({ "height": b, "count": r.count, "sample_points": sample });
    let mut ok = r.points.iter().all(|x| ptsearch::on_surface(&f, x));
    if oracle {
        let agrees = ptsearch::search_oracle(&f, b)? == r;
        v["oracle_agrees"] = json!(agrees);
        ok &= agrees;
    }
    Ok((v, ok))
}

fn parse_point(s: &str) -> Result<[i64; 4]> {
    let v: Vec<i64> = s.split(':').map(|t| t.trim().parse::<i64>()).collect::<Result<_, _>>().context("point")?;
    v.try_into().map_err(|_| anyhow!("a point has four coordinates"))
}

fn evaluate(surface: &str, psi: &str, point: &str, primes: Option<&[u64]>, seed: u64) -> Result<(Value, bool)> {
    let f = load_form(surface)?;
    let (ext, psi) = RepresentingFunction::from_json(&read_input(psi)?)?;
    let x = parse_point(point)?;
    if !ptsearch::on_surface(&f, &x) {
        bail!("{point} is not on the surface");
    }
    let sym = LocalSymbols::new(ext, seed)?;
    let value = psi.value(&x).ok_or_else(|| anyhow!("Ψ has a zero or pole at {point}"))?;
    let primes = primes.map_or_else(|| sym.support(&value), |p| p.to_vec());
    let mut local = BTreeMap::new();
    let mut ok = true;
    for &p in &primes {
        let r = locsym::ev_p(&sym, &psi, &x, p);
        ok &= r.is_ok();
        local.insert(p.to_string(), r.map_or_else(|e| json!(e.to_string()), |t| json!(t.to_string())));
    }
    let sum = locsym::adelic_sum(&sym, &psi, &x, &primes);
    ok &= sum == Ok(Third::ZERO);
    Ok((
        json!({
            "point": point,
            "psi_value": value.to_string(),
            "local_values": local,
            "adelic_sum": sum.map_or_else(|e| json!(e.to_string()), |t| json!(t.to_string())),
        }),
        ok,
    ))
}

fn paper_suite(filter: Option<&str>, extended: bool, seed: u64) -> Result<(Value, bool)> {
    if let Some(f) = filter {
        if !suite::modules().contains(&f) {
            bail!("unknown module {f}; known: {}", suite::modules().join(", "));
        }
    }
    let report = suite::run(filter, &SuiteConfig { seed, extended }, |r| eprintln!("{}", r.line()));
    let ok = report.all_pass;
    Ok((serde_json::to_value(&report)?, ok))
}

fn dispatch(cli: &Cli) -> Result<(Value, bool)> {
    match &cli.command {
        Command::Census { object, kind } => census(object.as_deref(), kind.as_deref()),
        Command::H1(g) => h1(g),
        Command::Classmap { group, d1, d2 } => classmap(group, d1, d2),
        Command::Descent { data, lines } => descent_cmd(data, *lines),
        Command::FpReport { form, p, kmax } => fp_report(form, *p, *kmax),
        Command::Search { form, height, extended, oracle, samples } => {
            search_cmd(form, *height, *extended, *oracle, *samples)
        }
        Command::Evaluate { surface, psi, point, primes } => {
            evaluate(surface, psi, point, primes.as_deref(), cli.seed)
        }
        Command::PaperSuite { filter, extended } => paper_suite(filter.as_deref(), *extended, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.parallel {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok((v, ok)) => {
            // a closed pipe is not an error of the computation
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&v).expect("serializable"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
