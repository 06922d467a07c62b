use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use qquasi::catalog::{self, ArithmeticFunction, BaseSequence, Kind};
use qquasi::linrep::{LinRepError, LinearRepresentation, Matrix};
use qquasi::quasi;
use qquasi::stats::{self, ConstantsResult, Scale};
use qquasi::{round_sig, BigUint, Rational, Transducer};
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::failure::{Failure, OrFailure};
use crate::{Command, ConstantsArgs, ExperimentArgs, KindArg, MethodArg, SplitArgs};

/// Run-length closed forms sum `ln s_i` up to this `i` when an experiment
/// needs reference constants.
const REFERENCE_RUNLENGTH_CUTOFF: u32 = 60;

pub fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Eval { function, n } => eval(&function, &n),
        Command::Split(args) => split(args),
        Command::Verify { function, r, trials, seed } => verify(&function, r, trials, seed.seed),
        Command::ClassifyLinrep { file, kind, rmax, minimize, stabilize } => {
            classify_linrep(&file, kind, rmax, minimize, stabilize)
        }
        Command::ClassifyTransducer { file, rmax } => classify_transducer(&file, rmax),
        Command::Constants(args) => constants(args),
        Command::Experiment(args) => experiment(args),
        Command::Catalog => catalog(),
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
fn render(value: impl Serialize) -> String {
    fn round(v: &mut Json) {
        match v {
            Json::Number(n) if n.is_f64() => {
                let x = n.as_f64().expect("f64 number");
                *v = json!(round_sig(x, 12));
            }
            Json::Array(xs) => xs.iter_mut().for_each(round),
            Json::Object(map) => map.values_mut().for_each(round),
            _ => {}
        }
    }
    let mut v = serde_json::to_value(value).expect("serializable output");
    round(&mut v);
    serde_json::to_string_pretty(&v).expect("serializable output")
}

fn function(name: &str) -> Result<ArithmeticFunction, Failure> {
    catalog::lookup(name).or_precondition()
}

fn parse_n(s: &str) -> Result<BigUint, Failure> {
    s.trim()
        .parse::<BigUint>()
        .map_err(|_| Failure::precondition(anyhow!("not a nonnegative integer: {s:?}")))
}

/// `1000`, `10^18` or `1e18`.
fn parse_bound(s: &str) -> Result<BigUint, Failure> {
    let bad = || Failure::precondition(anyhow!("not a positive integer bound: {s:?}"));
    let s = s.trim();
    let value = if let Some((base, exp)) = s.split_once('^') {
        let base: BigUint = base.parse().map_err(|_| bad())?;
        base.pow(exp.parse::<u32>().map_err(|_| bad())?)
    } else if let Some((mantissa, exp)) = s.split_once(['e', 'E']) {
        let mantissa: BigUint = mantissa.parse().map_err(|_| bad())?;
        mantissa * BigUint::from(10u32).pow(exp.parse::<u32>().map_err(|_| bad())?)
    } else {
        s.parse().map_err(|_| bad())?
    };
    if value == BigUint::default() {
        return Err(bad());
    }
    Ok(value)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .or_precondition()
}

fn matrix_json(m: &Matrix) -> Json {
    json!(m
        .to_rows()
        .iter()
        .map(|row| row.iter().map(Rational::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn vectors_json(vs: &[Vec<Rational>]) -> Json {
    json!(vs
        .iter()
        .map(|v| v.iter().map(Rational::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn eval(name: &str, n: &str) -> Result<String, Failure> {
    let f = function(name)?;
    let n = parse_n(n)?;
    let value = f.eval(&n);
    Ok(render(json!({ "function": f.name(), "n": n.to_string(), "value": value })))
}

fn split(args: SplitArgs) -> Result<String, Failure> {
    let n = parse_n(&args.n)?;
    let f = args.function.as_deref().map(function).transpose()?;
    let q = match (&f, args.q) {
        (Some(f), _) => f.base(),
        (None, Some(q)) => q,
        (None, None) => unreachable!("clap requires --q without --fn"),
    };
    if q < 2 {
        return Err(Failure::precondition(anyhow!("base must be at least 2, got {q}")));
    }
    let r = args.r.or(f.as_ref().map(ArithmeticFunction::parameter)).expect("clap requires --r without --fn");
    let decomposition = quasi::split(&n, q, r);
    let mut out = serde_json::to_value(&decomposition).expect("serializable");
    if let Some(f) = &f {
        let direct = f.eval(&n);
        let by_parts = quasi::split_evaluate_with(f, &n, r);
        out["function"] = json!(f.name());
        out["value"] = json!(direct);
        out["value_from_parts"] = json!(by_parts);
        out["agree"] = json!(direct == by_parts);
    }
    Ok(render(out))
}

fn verify(name: &str, r: Option<u32>, trials: usize, seed: u64) -> Result<String, Failure> {
    let f = function(name)?;
    let r = r.unwrap_or(f.parameter());
    let verdict = quasi::verify_definition(&f, r, trials, seed);
    let out = render(&verdict);
    if verdict.passed {
        Ok(out)
    } else {
        Err(Failure::math(anyhow!("{} violates the identity with r = {r}", f.name())).with_output(out))
    }
}

fn classify_linrep(path: &Path, kind: KindArg, rmax: u32, minimize: bool, stabilize: bool) -> Result<String, Failure> {
    let kind = match kind {
        KindArg::Add => Kind::Additive,
        KindArg::Mult => Kind::Multiplicative,
    };
    let input = LinearRepresentation::from_json(&read(path)?)?;
    let input_dim = input.dim();
    let zero_insensitive = input.is_zero_insensitive();
    let mut rep = input;
    if !zero_insensitive {
        if !stabilize {
            return Err(LinRepError::NotZeroInsensitive.into());
        }
        rep = rep.stabilize()?;
    }
    if minimize {
        rep = rep.minimize()?;
    }
    let profile = rep.parameter_profile(kind, rmax).map_err(|e| match e {
        LinRepError::NotMinimal { .. } => Failure::math(anyhow!("{e}; pass --minimize to reduce it first")),
        e => e.into(),
    })?;
    let minimal_r = profile.iter().position(|&ok| ok).map(|r| r as u32);
    let certificate = match kind {
        Kind::Additive => {
            let c = rep.additive_certificate(minimal_r.unwrap_or(rmax))?;
            json!({
                "r": c.r,
                "holds": c.holds(),
                "value_at_zero_vanishes": c.value_at_zero_vanishes,
                "u_orthogonal": c.u_orthogonal,
                "v_orthogonal": c.v_orthogonal,
                "cross_vanishes": c.cross_vanishes,
                "u_space_dim": c.u_space.len(),
                "v_space_dim": c.v_space.len(),
                "u_space": vectors_json(c.u_space.vectors()),
                "v_space": vectors_json(c.v_space.vectors()),
            })
        }
        Kind::Multiplicative => {
            let r = minimal_r.unwrap_or(rmax);
            json!({
                "r": r,
                "holds": rep.raw_multiplicative_test(r),
                "m0_power": matrix_json(&rep.matrix(0).pow(r)),
                "v_ut": matrix_json(&Matrix::outer(rep.v(), rep.u())),
            })
        }
    };
    let out = render(json!({
        "q": rep.base(),
        "kind": kind,
        "input_dimension": input_dim,
        "zero_insensitive": zero_insensitive,
        "stabilized": !zero_insensitive,
        "minimized": minimize,
        "dimension": rep.dim(),
        "rmax": rmax,
        "profile": profile,
        "minimal_r": minimal_r,
        "certificate": certificate,
    }));
    match minimal_r {
        Some(_) => Ok(out),
        None => Err(Failure::math(anyhow!("no parameter r <= {rmax} passes the {kind} test")).with_output(out)),
    }
}

fn classify_transducer(path: &Path, rmax: u32) -> Result<String, Failure> {
    let t = Transducer::from_json(&read(path)?).or_precondition()?;
    let minimal_r = t.min_reset_parameter(rmax);
    let reports: Vec<_> = (0..=minimal_r.unwrap_or(rmax)).map(|r| t.check_reset(r)).collect();
    let rep = t.to_linear_representation();
    let representation_additive = minimal_r.map(|r| rep.is_quasiadditive(r)).transpose()?;
    let out = render(json!({
        "q": t.base(),
        "states": t.states(),
        "connected": t.is_connected(),
        "rmax": rmax,
        "minimal_r": minimal_r,
        "reports": reports,
        "representation_dimension": rep.dim(),
        "representation_quasiadditive": representation_additive,
    }));
    match minimal_r {
        Some(_) => Ok(out),
        None => Err(Failure::math(anyhow!("no reset parameter r <= {rmax} satisfies all conditions")).with_output(out)),
    }
}

/// The sequence behind a `runlength_<name>` catalog entry.
fn runlength_sequence(f: &ArithmeticFunction) -> Option<BaseSequence> {
    let name = f.name().strip_prefix("runlength_")?;
    [BaseSequence::jacobsthal(), BaseSequence::constant_one()]
        .into_iter()
        .find(|s| s.name() == name)
}

fn constants(args: ConstantsArgs) -> Result<String, Failure> {
    let f = function(&args.function)?;
    let result = match args.method {
        MethodArg::Exact => stats::exact_constants_additive(&f, args.r)?,
        MethodArg::Truncated => stats::truncated_constants(&f, args.r, args.truncation, args.tolerance)?,
        MethodArg::Runlength => {
            let s = runlength_sequence(&f)
                .ok_or_else(|| Failure::precondition(anyhow!("{} is not a run length transform", f.name())))?;
            stats::runlength_constants(&s, args.cutoff)?
        }
        MethodArg::MonteCarlo => stats::monte_carlo_constants(&f, args.k, args.samples, args.seed.seed)?,
    };
    Ok(render(&result))
}

/// The best available constants: exact for additive functions with a
/// finite-state evaluator, closed forms for run length transforms, the
/// truncated series otherwise.
fn reference_constants(f: &ArithmeticFunction, truncation: usize) -> Result<ConstantsResult, Failure> {
    let finite_state = f.linear_representation().is_some() || f.transducer().is_some();
    if f.kind() == Kind::Additive && finite_state {
        return Ok(stats::exact_constants_additive(f, None)?);
    }
    if let Some(s) = runlength_sequence(f) {
        return Ok(stats::runlength_constants(&s, REFERENCE_RUNLENGTH_CUTOFF)?);
    }
    Ok(stats::truncated_constants(f, None, truncation, None)?)
}

fn experiment(args: ExperimentArgs) -> Result<String, Failure> {
    let f = function(&args.function)?;
    let scale = match (args.k, &args.bound) {
        (Some(k), _) => Scale::Power(k),
        (None, Some(b)) => Scale::Bound(parse_bound(b)?),
        (None, None) => unreachable!("clap requires --k or --bound"),
    };
    let (mu, sigma2, reference) = match (args.mu, args.sigma2) {
        (Some(mu), Some(sigma2)) => (mu, sigma2, json!("given")),
        _ => {
            let c = reference_constants(&f, args.truncation)?;
            (c.mu.to_f64(), c.sigma2.to_f64(), serde_json::to_value(&c).expect("serializable"))
        }
    };
    let result = stats::clt_experiment(&f, &scale, args.samples, args.seed.seed, mu, sigma2)?;
    if let Some(path) = &args.csv {
        fs::write(path, result.histogram_csv())
            .with_context(|| format!("cannot write {}", path.display()))
            .or_precondition()?;
    }
    let mut out = serde_json::to_value(&result).expect("serializable");
    out["reference"] = reference;
    if let Some(path) = &args.csv {
        out["csv"] = json!(path.display().to_string());
    }
    Ok(render(out))
}

fn catalog() -> Result<String, Failure> {
    let entries: Vec<Json> = catalog::catalog_entries()
        .iter()
        .map(|f| {
            json!({
                "name": f.name(),
                "q": f.base(),
                "kind": f.kind(),
                "r": f.parameter(),
                "growth": f.growth(),
                "growth_bound": f.growth_bound(),
                "linear_representation": f.linear_representation().map(LinearRepresentation::dim),
                "transducer": f.transducer().map(Transducer::states),
            })
        })
        .collect();
    Ok(render(entries))
}
