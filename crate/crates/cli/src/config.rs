//! Flat key = value settings shared by the config file and the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    Text,
    /// Float list: "a:b:step", "x" or "x,y,z".
    Range,
    /// Two floats "a:b".
    Pair,
}

impl Kind {
    fn value_name(self) -> &'static str {
        match self {
            Kind::Float => "FLOAT",
            Kind::Int => "INT",
            Kind::Bool => "BOOL",
            Kind::Text => "TEXT",
            Kind::Range => "A:B:STEP",
            Kind::Pair => "A:B",
        }
    }
}

pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(
    name: &'static str,
    kind: Kind,
    default: Option<&'static str>,
    help: &'static str,
) -> Key {
    Key {
        name,
        kind,
        default,
        help,
    }
}

const OUTPUT: Key = key(
    "output",
    Kind::Text,
    Some("eqmeasure-out"),
    "output directory",
);
const FORMAT: Key = key(
    "format",
    Kind::Text,
    Some("csv,json"),
    "comma-separated output formats",
);
const THREADS: Key = key(
    "threads",
    Kind::Int,
    Some("0"),
    "worker threads for scans (0 = all cores)",
);
const ALPHA: Key = key("alpha", Kind::Float, None, "attractive power");
const BETA: Key = key("beta", Kind::Float, None, "repulsive power");
const MASS: Key = key("mass", Kind::Float, Some("1"), "total mass");
const SIZE: Key = key("n", Kind::Int, Some("100"), "number of basis coefficients");
const TIKHONOV: Key = key(
    "s",
    Kind::Float,
    Some("1e-13"),
    "Tikhonov parameter (0 = direct solve)",
);
const LAMBDA: Key = key(
    "lambda",
    Kind::Text,
    Some("auto"),
    "basis parameter: auto, alpha, beta or a number",
);
const METHOD: Key = key(
    "method",
    Kind::Text,
    Some("newton"),
    "optimizer: newton, golden or nelder-mead",
);
const BRACKET: Key = key(
    "bracket",
    Kind::Pair,
    Some("0.1:5"),
    "radius search bracket",
);
const SEED: Key = key("seed", Kind::Int, Some("0"), "random seed");

pub const COMMANDS: &[(&str, &str)] = &[
    (
        "solve",
        "single-interval measure for an attractive-repulsive kernel",
    ),
    ("solve2", "symmetric two-interval measure"),
    (
        "potential",
        "measure of a repulsive kernel in an external potential",
    ),
    (
        "scan-gap",
        "single-interval admissibility over an (alpha, beta) lattice",
    ),
    ("contour", "two-interval energies on an (a, b) grid"),
    ("simulate", "overdamped particle simulation"),
    (
        "validate",
        "cross-checks of a computed measure against independent oracles",
    ),
];

pub fn keys(command: &str) -> Vec<Key> {
    let mut v = vec![OUTPUT, FORMAT];
    match command {
        "solve" => v.extend([
            ALPHA,
            BETA,
            MASS,
            SIZE,
            TIKHONOV,
            LAMBDA,
            METHOD,
            BRACKET,
            key(
                "radius",
                Kind::Float,
                None,
                "solve at this radius instead of optimizing",
            ),
            key("curve", Kind::Range, None, "radii for an energy curve"),
        ]),
        "solve2" => v.extend([
            ALPHA,
            BETA,
            MASS,
            SIZE,
            TIKHONOV,
            LAMBDA,
            METHOD,
            key("init", Kind::Pair, None, "starting inner:outer boundaries"),
            key(
                "particles",
                Kind::Int,
                Some("200"),
                "swarm size for the starting guess",
            ),
            SEED,
            key(
                "force",
                Kind::Bool,
                Some("false"),
                "skip the single-interval check",
            ),
        ]),
        "potential" => v.extend([
            key("alpha", Kind::Float, None, "repulsive power in (-1, 1)"),
            key(
                "potential",
                Kind::Text,
                None,
                "external potential V(x), e.g. \"x^4 - sin(x)\"",
            ),
            MASS,
            key("n", Kind::Int, Some("40"), "number of basis coefficients"),
            TIKHONOV,
            LAMBDA,
            METHOD,
            key("init", Kind::Pair, Some("-1:1"), "starting support"),
            key(
                "symmetric",
                Kind::Bool,
                Some("false"),
                "restrict to supports [-R, R]",
            ),
            key(
                "check-degree",
                Kind::Int,
                Some("0"),
                "root-search cross-check degree (0 = off)",
            ),
        ]),
        "scan-gap" => v.extend([
            THREADS,
            key("alpha", Kind::Range, None, "attractive powers"),
            key("beta", Kind::Range, None, "repulsive powers"),
            MASS,
            SIZE,
            TIKHONOV,
        ]),
        "contour" => v.extend([
            THREADS,
            ALPHA,
            BETA,
            MASS,
            SIZE,
            TIKHONOV,
            LAMBDA,
            key("a", Kind::Range, None, "inner boundaries"),
            key("b", Kind::Range, None, "outer boundaries"),
        ]),
        "simulate" => v.extend([
            ALPHA,
            BETA,
            key("n", Kind::Int, Some("1000"), "number of particles"),
            key("steps", Kind::Int, Some("20000"), "maximum steps"),
            key("dt", Kind::Float, Some("0.2"), "step size"),
            key(
                "tol",
                Kind::Float,
                Some("1e-10"),
                "stop when no particle moves farther",
            ),
            SEED,
            key("init", Kind::Pair, Some("-1:1"), "uniform initial interval"),
            key("bins", Kind::Int, Some("100"), "histogram bins"),
            key(
                "compare",
                Kind::Bool,
                Some("true"),
                "compare with the spectral single-interval measure",
            ),
            key(
                "size",
                Kind::Int,
                Some("100"),
                "basis size for the comparison",
            ),
        ]),
        "validate" => v.extend([
            ALPHA,
            BETA,
            MASS,
            SIZE,
            TIKHONOV,
            LAMBDA,
            key(
                "particles",
                Kind::Int,
                Some("500"),
                "particles for the histogram check (0 = off)",
            ),
            key("steps", Kind::Int, Some("2000"), "particle steps"),
            key("dt", Kind::Float, Some("0.2"), "particle step size"),
            SEED,
        ]),
        _ => {}
    }
    v
}

impl Key {
    pub fn arg(&self) -> clap::Arg {
        let mut help = self.help.to_string();
        if let Some(d) = self.default {
            help.push_str(&format!(" [default: {d}]"));
        }
        clap::Arg::new(self.name)
            .long(self.name)
            .value_name(self.kind.value_name())
            .allow_hyphen_values(true)
            .help(help)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub Vec<String>);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn normalize(k: &str) -> String {
    k.trim().replace('_', "-")
}

/// Parses "key = value" lines; '#' starts a comment.
pub fn parse_file_text(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                let k = normalize(k);
                if out.insert(k.clone(), v.trim().to_string()).is_some() {
                    errors.push(format!("line {}: duplicate key '{k}'", i + 1));
                }
            }
            _ => errors.push(format!(
                "line {}: expected key = value, got '{line}'",
                i + 1
            )),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(UsageError(errors))
    }
}

pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(vec![format!("cannot read config {}: {e}", path.display())]))?;
    parse_file_text(&text)
}

/// Inclusive range "a:b:step", a single value, or a comma list.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{t}' is not a number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || b < a || !(a.is_finite() && b.is_finite()) {
                return Err(format!("range '{s}' needs a <= b and step > 0"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(format!("range '{s}' has too many points"));
            }
            let mut v: Vec<f64> = (0..count).map(|i| a + i as f64 * step).collect();
            // snap a last point that is b up to rounding
            if let Some(last) = v.last_mut() {
                if (*last - b).abs() < 1e-6 * step {
                    *last = b;
                }
            }
            Ok(v)
        }
        _ => Err(format!(
            "range '{s}' must be a:b:step, a value or a comma list"
        )),
    }
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("'{s}' must be a:b"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{t}' is not a number"))
    };
    Ok((num(a)?, num(b)?))
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

fn check(kind: Kind, v: &str) -> Result<(), String> {
    let ok = match kind {
        Kind::Float => v
            .parse::<f64>()
            .map(|_| ())
            .map_err(|_| "expected a number".to_string()),
        Kind::Int => v
            .parse::<u64>()
            .map(|_| ())
            .map_err(|_| "expected a nonnegative integer".to_string()),
        Kind::Bool => parse_bool(v)
            .map(|_| ())
            .ok_or_else(|| "expected true or false".to_string()),
        Kind::Text => Ok(()),
        Kind::Range => parse_range(v).map(|_| ()),
        Kind::Pair => parse_pair(v).map(|_| ()),
    };
    ok.map_err(|e| format!("{e}, got '{v}'"))
}

/// Resolved settings of one run: defaults, then the file, then flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(
        command: &str,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
    ) -> Result<Self, UsageError> {
        let table = keys(command);
        let mut errors = Vec::new();
        let unknown: Vec<&String> = file
            .keys()
            .filter(|k| !table.iter().any(|t| t.name == k.as_str()))
            .collect();
        if !unknown.is_empty() {
            let names: Vec<&str> = unknown.iter().map(|s| s.as_str()).collect();
            errors.push(format!(
                "unknown keys for '{command}': {}",
                names.join(", ")
            ));
        }
        let mut values = BTreeMap::new();
        for k in &table {
            let v = flags
                .get(k.name)
                .or_else(|| file.get(k.name))
                .cloned()
                .or_else(|| k.default.map(str::to_string));
            if let Some(v) = v {
                if let Err(e) = check(k.kind, &v) {
                    errors.push(format!("{}: {e}", k.name));
                }
                values.insert(k.name.to_string(), v);
            }
        }
        if errors.is_empty() {
            Ok(Self {
                command: command.to_string(),
                values,
            })
        } else {
            Err(UsageError(errors))
        }
    }

    fn raw(&self, k: &str) -> Option<&str> {
        self.values.get(k).map(String::as_str)
    }

    pub fn has(&self, k: &str) -> bool {
        self.values.contains_key(k)
    }

    fn require(&self, k: &str) -> Result<&str, UsageError> {
        self.raw(k)
            .ok_or_else(|| UsageError(vec![format!("'{}' needs --{k}", self.command)]))
    }

    // values were type-checked in resolve, so parsing below cannot fail

    pub fn float(&self, k: &str) -> Result<f64, UsageError> {
        Ok(self.require(k)?.parse().unwrap())
    }

    pub fn opt_float(&self, k: &str) -> Option<f64> {
        self.raw(k).map(|v| v.parse().unwrap())
    }

    pub fn int(&self, k: &str) -> Result<usize, UsageError> {
        Ok(self.require(k)?.parse().unwrap())
    }

    pub fn bool(&self, k: &str) -> Result<bool, UsageError> {
        Ok(parse_bool(self.require(k)?).unwrap())
    }

    pub fn text(&self, k: &str) -> Result<&str, UsageError> {
        self.require(k)
    }

    pub fn range(&self, k: &str) -> Result<Vec<f64>, UsageError> {
        Ok(parse_range(self.require(k)?).unwrap())
    }

    pub fn pair(&self, k: &str) -> Result<(f64, f64), UsageError> {
        Ok(parse_pair(self.require(k)?).unwrap())
    }

    pub fn opt_pair(&self, k: &str) -> Option<(f64, f64)> {
        self.raw(k).map(|v| parse_pair(v).unwrap())
    }

    /// The settings as a config file that reproduces the run.
    pub fn to_file_text(&self) -> String {
        let mut s = format!(
            "# eqmeasure {} {}\n",
            self.command,
            env!("CARGO_PKG_VERSION")
        );
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}
