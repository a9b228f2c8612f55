use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use twinlat::apartments::{apartment_dot, common_apartment};
use twinlat::flags::{FlagJson, Geometry, PeriodicFlag};
use twinlat::laurent::Side;
use twinlat::verify::{building_dot, codistance_via_apartment, run_suite, SuiteConfig};
use twinlat::weyl::{CoxeterType, TypeTag};
use twinlat::{Error, Field, F11, F13, F2, F3, F5, F7};

#[derive(Parser, Debug)]
#[command(name = "twinlat", version, about = "Affine twin buildings of periodic lattice flags")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run the axiom checks and write JSON reports.
    Verify(VerifyArgs),
    /// Print the codistance of a positive and a negative chamber.
    Codistance(PairArgs),
    /// Write chamber graphs in DOT syntax.
    Export(ExportArgs),
    /// Complete a flag to a chamber.
    Complete(CompleteArgs),
    /// Print a frame whose apartment contains both flags.
    Frame(PairArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TypeArg {
    A,
    B,
    C,
    D,
}

impl From<TypeArg> for TypeTag {
    fn from(t: TypeArg) -> Self {
        match t {
            TypeArg::A => TypeTag::A,
            TypeArg::B => TypeTag::B,
            TypeArg::C => TypeTag::C,
            TypeArg::D => TypeTag::D,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct GeomArgs {
    #[arg(long = "type", value_enum, ignore_case = true, default_value = "a")]
    ty: TypeArg,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    geom: GeomArgs,
    #[arg(long, default_value_t = 2)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Report file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PairArgs {
    first: PathBuf,
    second: PathBuf,
    /// Field size; read from the files when absent.
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    geom: GeomArgs,
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Directory for `apartment.dot` and `building.dot`; standard output
    /// when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    /// Flag file; the empty flag of `--type`/`--n` when absent.
    input: Option<PathBuf>,
    #[command(flatten)]
    geom: GeomArgs,
    #[arg(long)]
    negative: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Fail {
    Config(String),
    Parse(String),
    NoTwin(String),
    Io(String),
    Other(String),
    Checks(usize),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Config(_) | Fail::Parse(_) => 2,
            Fail::NoTwin(_) => 3,
            Fail::Io(_) => 4,
            Fail::Other(_) | Fail::Checks(_) => 1,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Fail::Config(e.to_string()),
            Error::Parse(_) => Fail::Parse(e.to_string()),
            Error::NoTwinApartmentFound => Fail::NoTwin(e.to_string()),
            _ => Fail::Other(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Fail>;

macro_rules! with_field {
    ($q:expr, $F:ident => $body:expr) => {
        match $q {
            2 => {
                type $F = F2;
                $body
            }
            3 => {
                type $F = F3;
                $body
            }
            5 => {
                type $F = F5;
                $body
            }
            7 => {
                type $F = F7;
                $body
            }
            11 => {
                type $F = F11;
                $body
            }
            13 => {
                type $F = F13;
                $body
            }
            q => Err(Fail::Config(format!("q = {q} is not a supported prime (2, 3, 5, 7, 11, 13)"))),
        }
    };
}

fn geometry<F: Field>(a: &GeomArgs) -> Res<Geometry<F>> {
    let ty = CoxeterType::new(a.ty.into(), a.n).map_err(|e| Fail::Config(e.to_string()))?;
    if ty.is_isometric() && F::MODULUS % 2 == 0 {
        return Err(Fail::Config(format!("type {} needs an odd q", ty.tag)));
    }
    Geometry::new(ty).map_err(|e| Fail::Config(e.to_string()))
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn flag_json(path: &Path) -> Res<FlagJson> {
    serde_json::from_str(&read(path)?).map_err(|e| Fail::Parse(format!("{}: {e}", path.display())))
}

fn file_q(j: &FlagJson) -> Res<u32> {
    j.subspaces.first().map(|l| l.q).ok_or_else(|| Fail::Parse("flag without subspaces".into()))
}

fn flag<F: Field>(j: &FlagJson) -> Res<PeriodicFlag<F>> {
    PeriodicFlag::from_json(j).map_err(|e| Fail::Parse(e.to_string()))
}

fn verify<F: Field>(a: &VerifyArgs) -> Res<()> {
    let g = geometry::<F>(&a.geom)?;
    if a.window == 0 {
        return Err(Fail::Config("window must be at least 1".into()));
    }
    let cfg = SuiteConfig { seed: a.seed, window: a.window, samples: a.samples, radius: a.radius };
    let reports = run_suite(g, cfg)?;
    write_out(a.out.as_deref(), &to_json(&reports))?;
    let mut failed = 0;
    for r in &reports {
        eprintln!("{:<24} samples {:>5}  failures {}", r.check, r.samples, r.failures.len());
        failed += r.failures.len();
    }
    if failed > 0 {
        return Err(Fail::Checks(failed));
    }
    Ok(())
}

fn pair_q(a: &PairArgs) -> Res<(FlagJson, FlagJson, u32)> {
    let (j1, j2) = (flag_json(&a.first)?, flag_json(&a.second)?);
    let q = match a.q {
        Some(q) => q,
        None => file_q(&j1)?,
    };
    Ok((j1, j2, q))
}

fn codistance<F: Field>(a: &PairArgs, j1: &FlagJson, j2: &FlagJson) -> Res<()> {
    use rand::SeedableRng;
    let (x, y) = (flag::<F>(j1)?, flag::<F>(j2)?);
    if x.side() == y.side() {
        return Err(Fail::Parse("the two flags lie on the same side".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let (d, _) = codistance_via_apartment(&x, &y, Side::Negative, &mut rng)?;
    write_out(a.out.as_deref(), &format!("word: {}\nlength: {}\n", d.word_string(), d.length()))
}

fn frame<F: Field>(a: &PairArgs, j1: &FlagJson, j2: &FlagJson) -> Res<()> {
    let (x, y) = (flag::<F>(j1)?, flag::<F>(j2)?);
    let ca = common_apartment(&x, &y)?;
    write_out(a.out.as_deref(), &to_json(&ca.frame.to_json()))
}

fn export<F: Field>(a: &ExportArgs) -> Res<()> {
    let g = geometry::<F>(&a.geom)?;
    let ap = apartment_dot(&twinlat::apartments::Frame::standard(g), a.radius);
    let bd = building_dot(g, Side::Positive, a.radius)?;
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Fail::Io(format!("{}: {e}", dir.display())))?;
            write_out(Some(&dir.join("apartment.dot")), &ap)?;
            write_out(Some(&dir.join("building.dot")), &bd)
        }
        None => write_out(None, &(ap + &bd)),
    }
}

fn complete<F: Field>(a: &CompleteArgs, j: Option<&FlagJson>) -> Res<()> {
    use rand::SeedableRng;
    let f = match j {
        Some(j) => flag::<F>(j)?,
        None => {
            let side = if a.negative { Side::Negative } else { Side::Positive };
            PeriodicFlag::empty(geometry::<F>(&a.geom)?, side)
        }
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let c = f.complete(&mut rng)?;
    write_out(a.out.as_deref(), &to_json(&c.to_json()))
}

fn run(cli: Cli) -> Res<()> {
    match cli.cmd {
        Cmd::Verify(a) => with_field!(a.geom.q, F => verify::<F>(&a)),
        Cmd::Export(a) => with_field!(a.geom.q, F => export::<F>(&a)),
        Cmd::Codistance(a) => {
            let (j1, j2, q) = pair_q(&a)?;
            with_field!(q, F => codistance::<F>(&a, &j1, &j2))
        }
        Cmd::Frame(a) => {
            let (j1, j2, q) = pair_q(&a)?;
            with_field!(q, F => frame::<F>(&a, &j1, &j2))
        }
        Cmd::Complete(a) => {
            let j = a.input.as_deref().map(flag_json).transpose()?;
            let q = match &j {
                Some(j) => file_q(j)?,
                None => a.geom.q,
            };
            with_field!(q, F => complete::<F>(&a, j.as_ref()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Fail::Checks(n) => eprintln!("{n} check failures"),
                Fail::Config(m) | Fail::Parse(m) | Fail::NoTwin(m) | Fail::Io(m) | Fail::Other(m) => {
                    eprintln!("error: {m}")
                }
            }
            ExitCode::from(f.code())
        }
    }
}
