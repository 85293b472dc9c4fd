use clap::{Args, Parser, Subcommand, ValueEnum};
use selfsim::automatic::{from_group_ring, DEFAULT_SYMBOL_CAP};
use selfsim::mealy::parse_group;
use selfsim::recursion::{level_matrix_element, level_matrix_via_permutation};
use selfsim::sequences::{kernel, thue_morse, toeplitz_from_alpha, SequenceSystem};
use selfsim::series::{
    diagonal_series, relation_b1, relation_c1, relation_d1, series_of_sequence, verify_algebraic, FpSeries,
};
use selfsim::triangular::{
    alpha, first_diagonal, first_diagonal_oracle, height_brute, height_p2, height_rk, height_t, is_uniserial,
    tableau_of, uniserial_direct,
};
use selfsim::{render, Element, Field, Group, GroupRingElem, MarkedBasis, ReducedPoly};
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Domain(#[from] selfsim::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("check failed: {0}")]
    Check(String),
    #[error("{0}")]
    Input(String),
}

type Outcome = Result<(), Failure>;

/// Self-similar groups and their automatic matrices over F_p.
#[derive(Parser)]
#[command(name = "selfsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisName {
    Delta,
    Monomial,
    Binomial,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Csv,
    Image,
}

#[derive(Clone, Copy, ValueEnum)]
enum Relation {
    B1,
    C1,
    D1,
    ThueMorse,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    ThueMorse,
}

#[derive(Args)]
struct Target {
    /// Group file.
    #[arg(long)]
    group: PathBuf,
    /// Element expression, e.g. `ab`, `b'`, `(ad)^2`.
    #[arg(long)]
    element: String,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Image of a word (digits, first letter first).
    Act {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        word: String,
    },
    /// Level-n matrix of an element.
    Matrix {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value = "binomial")]
        basis: BasisName,
        #[arg(long, value_enum, default_value = "csv")]
        format: MatrixFormat,
        #[command(flatten)]
        output: Output,
        /// Compare with the conjugated permutation matrix.
        #[arg(long)]
        check: bool,
    },
    /// Single entry of the infinite matrix.
    Entry {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        row: u64,
        #[arg(long)]
        col: u64,
        #[arg(long, value_enum, default_value = "binomial")]
        basis: BasisName,
    },
    /// Diagonal of the matrix as CSV, one entry per line.
    Diagonal {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        length: usize,
        /// Diagonal index; 1 is the first diagonal above the main one.
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[arg(long, value_enum, default_value = "binomial")]
        basis: BasisName,
        #[command(flatten)]
        output: Output,
        /// Compare the valuation formula with the matrix.
        #[arg(long)]
        check: bool,
    },
    /// Abelianization sequence.
    Alpha {
        #[command(flatten)]
        target: Target,
    },
    /// Tableau polynomials to a given depth.
    Tableau {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        level: usize,
    },
    /// Height of a function on X^n given by its values, or of each tableau entry.
    Height {
        #[arg(long, required_unless_present = "values")]
        group: Option<PathBuf>,
        #[arg(long, requires = "group")]
        element: Option<String>,
        #[arg(long, requires = "group")]
        level: Option<usize>,
        /// Alphabet size for `--values`.
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Comma-separated values in inverse-lexicographic order of X^n.
        #[arg(long, conflicts_with = "group")]
        values: Option<String>,
        /// Run every height algorithm and compare.
        #[arg(long)]
        check: bool,
    },
    /// Uniseriality criterion for the generators of a group.
    Uniserial {
        #[arg(long)]
        group: PathBuf,
        /// Compare with the direct check at this level.
        #[arg(long)]
        check: Option<usize>,
    },
    /// Kernel of the first diagonal of an element, or of a built-in sequence.
    Kernel {
        #[arg(long, required_unless_present = "sequence")]
        group: Option<PathBuf>,
        #[arg(long, requires = "group")]
        element: Option<String>,
        #[arg(long, value_enum, conflicts_with = "group")]
        sequence: Option<Builtin>,
        #[arg(long, default_value_t = 64)]
        prefix_len: usize,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        /// Re-predict terms beyond the identification prefix.
        #[arg(long)]
        check: bool,
    },
    /// Term `s_n` of the first diagonal of an element, or of a built-in sequence.
    Term {
        #[arg(long, required_unless_present = "sequence")]
        group: Option<PathBuf>,
        #[arg(long, requires = "group")]
        element: Option<String>,
        #[arg(long, value_enum, conflicts_with = "group")]
        sequence: Option<Builtin>,
        #[arg(long)]
        n: u64,
    },
    /// Checks an algebraic relation for a diagonal series.
    SeriesVerify {
        #[arg(long, value_enum)]
        relation: Relation,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        element: Option<String>,
        /// Truncation order N of the series.
        #[arg(long, default_value_t = 63)]
        truncation: usize,
        /// Check modulo s^order; defaults to N.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Level-n matrix as a PBM (p = 2) or PGM image.
    Render {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value = "binomial")]
        basis: BasisName,
        #[command(flatten)]
        output: Output,
    },
}

fn load(path: &PathBuf) -> Result<Group, Failure> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_group(&text)?)
}

fn load_target(t: &Target) -> Result<(Group, Element), Failure> {
    let group = load(&t.group)?;
    let e = group.parse_element(&t.element)?;
    Ok((group, e))
}

fn basis_of(name: BasisName, p: usize) -> Result<MarkedBasis, Failure> {
    let p = p as u64;
    Ok(match name {
        BasisName::Delta => MarkedBasis::delta(p)?,
        BasisName::Monomial => MarkedBasis::monomial(p)?,
        BasisName::Binomial => MarkedBasis::binomial(p)?,
    })
}

fn emit(output: &Output, text: &str) -> Outcome {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_digits(text: &str, d: usize) -> Result<Vec<u8>, Failure> {
    text.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| {
            c.to_digit(10)
                .filter(|&x| (x as usize) < d)
                .map(|x| x as u8)
                .ok_or_else(|| Failure::Input(format!("invalid letter {c:?} for alphabet of size {d}")))
        })
        .collect()
}

fn sequence_source(
    group: &Option<PathBuf>,
    element: &Option<String>,
    builtin: Option<Builtin>,
) -> Result<SequenceSystem, Failure> {
    if let Some(Builtin::ThueMorse) = builtin {
        return Ok(thue_morse());
    }
    let path = group.as_ref().ok_or_else(|| Failure::Input("--group or --sequence required".into()))?;
    let element = element.as_ref().ok_or_else(|| Failure::Input("--element required".into()))?;
    let group = load(path)?;
    let a = alpha(&group, &group.parse_element(element)?)?;
    Ok(toeplitz_from_alpha(a.preperiod(), a.period(), group.degree())?)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Act { target, word } => {
            let (group, e) = load_target(&target)?;
            let w = parse_digits(&word, group.degree())?;
            let out: String = group.act(&e, &w)?.iter().map(u8::to_string).collect();
            println!("{out}");
        }
        Command::Matrix { target, level, basis, format, output, check } => {
            let (group, e) = load_target(&target)?;
            let basis = basis_of(basis, group.degree())?;
            let m = level_matrix_element(&group, &e, level, &basis)?;
            if check && level_matrix_via_permutation(&group, &e, level, &basis)? != m {
                return Err(Failure::Check("level matrix differs from conjugated permutation matrix".into()));
            }
            let text = match format {
                MatrixFormat::Csv => render::to_csv(&m),
                MatrixFormat::Image => render::render(&m),
            };
            emit(&output, &text)?;
        }
        Command::Entry { target, row, col, basis } => {
            let (group, e) = load_target(&target)?;
            let basis = basis_of(basis, group.degree())?;
            let a = GroupRingElem::from_element(&group, basis.field(), &e)?;
            let m = from_group_ring(&group, &a, &basis, DEFAULT_SYMBOL_CAP)?;
            println!("{}", m.entry(row, col));
        }
        Command::Diagonal { target, length, index, basis, output, check } => {
            let (group, e) = load_target(&target)?;
            let basis = basis_of(basis, group.degree())?;
            let values = if index == 1 {
                first_diagonal(&group, &e, length)?
            } else {
                diagonal_series(&group, &e, index, length, &basis)?.coeffs().to_vec()
            };
            if check {
                let oracle = if index == 1 {
                    first_diagonal_oracle(&group, &e, length, &basis)?
                } else {
                    let m = level_matrix_element(&group, &e, level_for(group.degree(), length + index), &basis)?;
                    (0..length).map(|r| m.get(r, r + index)).collect()
                };
                if let Some(n) = values.iter().zip(&oracle).position(|(a, b)| a != b) {
                    return Err(Failure::Check(format!("diagonal {index} differs at position {n}")));
                }
            }
            emit(&output, &selfsim::sequences::to_csv(&values))?;
        }
        Command::Alpha { target } => {
            let (group, e) = load_target(&target)?;
            println!("{}", alpha(&group, &e)?);
        }
        Command::Tableau { target, level } => {
            let (group, e) = load_target(&target)?;
            print!("{}", tableau_of(&group, &e, level)?);
        }
        Command::Height { group, element, level, p, values, check } => {
            let polys = match values {
                Some(v) => {
                    let field = Field::new(p)?;
                    let vals = parse_digits(&v, p as usize)?;
                    let nvars = (0..=16)
                        .find(|&n| (p as usize).pow(n as u32) == vals.len())
                        .ok_or_else(|| Failure::Input(format!("{} values is not a power of {p}", vals.len())))?;
                    vec![ReducedPoly::interpolate(field, nvars, &vals)?]
                }
                None => {
                    let group = load(group.as_ref().expect("clap enforces --group"))?;
                    let element = element.ok_or_else(|| Failure::Input("--element required".into()))?;
                    let e = group.parse_element(&element)?;
                    let level = level.ok_or_else(|| Failure::Input("--level required".into()))?;
                    tableau_of(&group, &e, level)?.polys().to_vec()
                }
            };
            for f in &polys {
                let h = height_brute(f);
                if check {
                    let mut others = vec![height_rk(f), height_t(f)];
                    if f.field().p() == 2 {
                        others.push(height_p2(f)?);
                    }
                    if others.iter().any(|&o| o != h) {
                        return Err(Failure::Check(format!("height algorithms disagree on {f}")));
                    }
                }
                println!("{h}");
            }
        }
        Command::Uniserial { group, check } => {
            let group = load(&group)?;
            let gens = group.generators();
            let u = is_uniserial(&group, &gens)?;
            if let Some(n) = check {
                if uniserial_direct(&group, &gens, n)? != u.uniserial {
                    return Err(Failure::Check(format!("criterion and direct check disagree at level {n}")));
                }
            }
            println!("{}", u.uniserial);
        }
        Command::Kernel { group, element, sequence, prefix_len, cap, check } => {
            let source = sequence_source(&group, &element, sequence)?;
            let k = kernel(|n| source.term(n).ok(), source.arity(), prefix_len, cap)?;
            if check {
                let start = (prefix_len as u64).max(1 << 10);
                for n in start..start + 101 {
                    if k.term(n).ok() != source.term(n).ok() {
                        return Err(Failure::Check(format!("kernel mispredicts term {n}")));
                    }
                }
            }
            println!("symbols {}", k.num_symbols());
            for s in 0..k.num_symbols() {
                let head = k.head(s).map_or_else(|| "-".to_string(), |h| h.to_string());
                let steps: Vec<String> = (0..k.arity()).map(|i| k.step(s, i).to_string()).collect();
                println!("{s} {head} {}", steps.join(" "));
            }
        }
        Command::Term { group, element, sequence, n } => {
            let source = sequence_source(&group, &element, sequence)?;
            println!("{}", source.term(n)?);
        }
        Command::SeriesVerify { relation, group, element, truncation, order } => {
            let n = truncation;
            let (series, coeffs) = match relation {
                Relation::ThueMorse => {
                    let f = Field::new(2)?;
                    let t = series_of_sequence(f, &thue_morse().prefix(0, n)?);
                    let one_x = FpSeries::from_poly(f, &[1, 1], n);
                    (t, vec![FpSeries::monomial(f, 1, 1, n), one_x.pow(2), one_x.pow(3)])
                }
                rel => {
                    let path = group.as_ref().ok_or_else(|| Failure::Input("--group required".into()))?;
                    let name = element.ok_or_else(|| Failure::Input("--element required".into()))?;
                    let group = load(path)?;
                    let e = group.parse_element(&name)?;
                    let basis = MarkedBasis::binomial(group.degree() as u64)?;
                    let s = diagonal_series(&group, &e, 1, n, &basis)?;
                    let coeffs = match rel {
                        Relation::B1 => relation_b1(n),
                        Relation::C1 => relation_c1(n),
                        _ => relation_d1(n),
                    };
                    (s, coeffs)
                }
            };
            let order = order.unwrap_or(n);
            if !verify_algebraic(&series, &coeffs, order)? {
                return Err(Failure::Check(format!("relation fails modulo s^{order}")));
            }
            println!("relation holds modulo s^{order}");
        }
        Command::Render { target, level, basis, output } => {
            let (group, e) = load_target(&target)?;
            let basis = basis_of(basis, group.degree())?;
            let m = level_matrix_element(&group, &e, level, &basis)?;
            emit(&output, &render::render(&m))?;
        }
    }
    Ok(())
}

fn level_for(p: usize, size: usize) -> usize {
    let mut n = 0;
    while p.pow(n as u32) < size {
        n += 1;
    }
    n
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Failure::Input(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
