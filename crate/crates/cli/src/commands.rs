use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use trellis_core::embedding::{dagger_matrix, embed};
use trellis_core::peakreduce::{reduce_peak, PeakReduction};
use trellis_core::search::Beam;
use trellis_core::{
    bcjr, minimize_tbt, replay, EmbeddingSpec, Error as CoreError, ParityCheckMatrix, SearchConfig,
    StateComplexityProfile, Trellis, Vector, DEFAULT_ENUMERATION_CAP,
};

use crate::decode::decode;
use crate::document::TrellisDocument;
use crate::dot::to_dot;
use crate::error::{CliError, Result};
use crate::matrix_file::{emit_matrix, parse_matrix};
use crate::trace::TraceFile;

#[derive(Debug, Parser)]
#[command(
    name = "trellis",
    version,
    about = "Conventional and tail-biting trellises of linear block codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the minimal conventional trellis of a parity check matrix
    Construct {
        matrix: PathBuf,
        /// Write the trellis document here instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Embed a state at both ends of the matrix and build the tail-biting trellis
    Embed(EmbedArgs),
    /// Report structural properties of a trellis document
    Check { document: PathBuf },
    /// Lower the largest state space of the conventional trellis by one
    ReducePeak {
        matrix: PathBuf,
        /// Write the extended parity check matrix here
        #[arg(long)]
        dagger_out: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search embedding sequences for a tail-biting trellis with small states
    Search {
        matrix: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_embeddings: usize,
        /// Beam width: a number, "unlimited" or "auto"
        #[arg(long, default_value = "auto", value_parser = parse_beam)]
        beam: Beam,
        /// Write the embedding sequence of the best trellis here
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rebuild a tail-biting trellis from a matrix and a saved trace
    Replay {
        matrix: PathBuf,
        trace: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a trellis document as a Graphviz graph
    ExportDot {
        document: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Find the codeword closest to a received word
    Decode { document: PathBuf, received: String },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("plane").required(true).args(["hyperplane", "auto"])))]
pub struct EmbedArgs {
    pub matrix: PathBuf,
    #[arg(long)]
    pub index: usize,
    /// Embedded state as a digit string, one digit per matrix row
    #[arg(long)]
    pub alpha: String,
    /// Comma-separated basis of the hyperplane; an empty list means {0}
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub hyperplane: Option<Vec<String>>,
    /// Pick the first hyperplane avoiding alpha
    #[arg(long)]
    pub auto: bool,
    /// Write the extended parity check matrix here
    #[arg(long)]
    pub dagger_out: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_beam(s: &str) -> std::result::Result<Beam, String> {
    match s {
        "auto" => Ok(Beam::Auto),
        "unlimited" => Ok(Beam::Unlimited),
        _ => match s.parse::<usize>() {
            Ok(w) if w > 0 => Ok(Beam::Width(w)),
            _ => Err(format!(
                "'{s}' is not a positive width, \"auto\" or \"unlimited\""
            )),
        },
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_matrix(path: &Path) -> Result<ParityCheckMatrix> {
    parse_matrix(&read(path)?)
}

fn read_document(path: &Path) -> Result<Trellis> {
    TrellisDocument::from_json(&read(path)?)?.to_trellis()
}

fn digits(h: &ParityCheckMatrix, s: &str, what: &str) -> Result<Vector> {
    let v = Vector::from_digits(h.field(), s)
        .map_err(|e| CliError::Argument(format!("{what} \"{s}\": {e}")))?;
    if v.len() != h.r() {
        return Err(CliError::Argument(format!(
            "{what} \"{s}\" needs {} digits",
            h.r()
        )));
    }
    Ok(v)
}

struct Out<'a> {
    w: &'a mut dyn Write,
}

impl Out<'_> {
    fn line(&mut self, text: impl AsRef<str>) -> Result<()> {
        writeln!(self.w, "{}", text.as_ref()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
    }

    /// Writes `text` to `path`, or to the stream when no path is given.
    fn emit(&mut self, path: &Option<PathBuf>, text: &str) -> Result<()> {
        match path {
            Some(p) => write_file(p, text),
            None => self.line(text.trim_end()),
        }
    }

    fn document(&mut self, path: &Option<PathBuf>, t: &Trellis) -> Result<()> {
        self.emit(path, &TrellisDocument::from_trellis(t)?.to_json())
    }

    fn matrix(&mut self, h: &ParityCheckMatrix) -> Result<()> {
        for row in h.matrix().row_vectors() {
            self.line(format!("  {}", row.to_digits()))?;
        }
        Ok(())
    }
}

/// `s_max`, or the largest class size when it is not a power of q.
fn s_max(scp: &StateComplexityProfile) -> String {
    scp.s_max()
        .map_or_else(|| format!("{} states", scp.max_size()), |s| s.to_string())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn run(cli: &Cli, w: &mut dyn Write) -> Result<()> {
    let mut out = Out { w };
    match &cli.command {
        Command::Construct { matrix, output } => {
            let h = read_matrix(matrix)?;
            let t = bcjr(&h)?;
            out.line(format!("scp: {}", t.scp()))?;
            out.line(format!("s_max: {}", s_max(&t.scp())))?;
            out.document(output, &t)
        }
        Command::Embed(args) => cmd_embed(args, &mut out),
        Command::Check { document } => cmd_check(&read_document(document)?, &mut out),
        Command::ReducePeak {
            matrix,
            dagger_out,
            output,
        } => cmd_reduce_peak(&read_matrix(matrix)?, dagger_out, output, &mut out),
        Command::Search {
            matrix,
            max_embeddings,
            beam,
            trace_out,
            output,
        } => {
            let h = read_matrix(matrix)?;
            let cfg = SearchConfig::default()
                .with_max_embeddings(*max_embeddings)
                .with_beam(*beam);
            let res = minimize_tbt(&h, &cfg)?;
            let best = &res.best;
            out.line(format!("best scp: {}", best.scp()))?;
            out.line(format!("s_max: {}", s_max(&best.scp())))?;
            out.line(format!("embeddings: {}", best.k))?;
            out.line(format!("exhaustive: {}", yes(res.exhaustive)))?;
            out.line(format!("distinct trellises: {}", res.explored.len()))?;
            out.line(format!(
                "expansions: {} ({} skipped)",
                res.expansions, res.skipped
            ))?;
            for (i, s) in best.trace.iter().enumerate() {
                out.line(format!(
                    "step {}: index {} alpha {} hyperplane {}",
                    i + 1,
                    s.index,
                    s.alpha,
                    s.hyperplane
                ))?;
            }
            if let Some(p) = trace_out {
                write_file(
                    p,
                    &TraceFile::new(h.field().order(), h.n(), &best.trace).to_json(),
                )?;
            }
            out.document(output, &best.tbt)
        }
        Command::Replay {
            matrix,
            trace,
            output,
        } => {
            let h = read_matrix(matrix)?;
            let trace = TraceFile::from_json(&read(trace)?)?;
            if trace.q != h.field().order() || trace.n != h.n() {
                return Err(CliError::Document(format!(
                    "trace is for q={} n={}, matrix has q={} n={}",
                    trace.q,
                    trace.n,
                    h.field().order(),
                    h.n()
                )));
            }
            let t = replay(&h, &trace.specs()?)?;
            out.line(format!("scp: {}", t.scp()))?;
            out.document(output, &t)
        }
        Command::ExportDot { document, output } => {
            let dot = to_dot(&read_document(document)?)?;
            out.emit(output, &dot)
        }
        Command::Decode { document, received } => {
            let t = read_document(document)?;
            let r = Vector::from_digits(t.field(), received)
                .map_err(|e| CliError::Argument(format!("received word: {e}")))?;
            let d = decode(&t, &r)?;
            out.line(format!("codeword: {}", d.codeword))?;
            out.line(format!("distance: {}", d.distance))
        }
    }
}

fn cmd_embed(args: &EmbedArgs, out: &mut Out<'_>) -> Result<()> {
    let h = read_matrix(&args.matrix)?;
    let alpha = digits(&h, &args.alpha, "alpha")?;
    let spec = match &args.hyperplane {
        Some(basis) if !args.auto => {
            let vs = basis
                .iter()
                .filter(|b| !b.is_empty())
                .map(|b| digits(&h, b, "hyperplane vector"))
                .collect::<Result<Vec<_>>>()?;
            EmbeddingSpec::new(args.index, alpha, &vs)
        }
        _ => EmbeddingSpec::auto(&h, args.index, alpha)?,
    };
    let space = spec.validate(&h)?;
    let res = embed(&h, &spec)?;
    out.line(format!("state space: V_{} = {space}", spec.index))?;
    out.line(format!("alpha: {}", spec.alpha))?;
    out.line(format!("hyperplane: {}", spec.hyperplane))?;
    out.line(format!("functional: {}", spec.functional()?))?;
    out.line("h_dagger:")?;
    out.matrix(&res.h_dagger)?;
    out.line(format!("scp: {}", res.tbt.scp()))?;
    out.line(format!("s_max: {}", s_max(&res.tbt.scp())))?;
    if let Some(p) = &args.dagger_out {
        write_file(p, &emit_matrix(&res.h_dagger))?;
    }
    out.document(&args.output, &res.tbt)
}

fn cmd_check(t: &Trellis, out: &mut Out<'_>) -> Result<()> {
    let cap = DEFAULT_ENUMERATION_CAP;
    let kind = if t.is_tail_biting() {
        "tail-biting"
    } else {
        "conventional"
    };
    out.line(format!("shape: {kind}, depth {}", t.depth()))?;
    out.line(format!("scp: {}", t.scp()))?;
    out.line(format!("code size: {}", t.represented_code(cap)?.len()))?;
    out.line(format!("linear: {}", yes(t.is_linear(cap)?)))?;
    out.line(format!("biproper: {}", yes(t.is_biproper())))?;
    out.line(format!("reduced: {}", yes(t.is_reduced())))?;
    match t.mergeable_pair(cap)? {
        None => out.line("nonmergeable: yes"),
        Some(m) => {
            let name = |v: usize| {
                t.label(m.class, v)
                    .map_or_else(|| v.to_string(), |l| l.to_digits())
            };
            out.line(format!(
                "nonmergeable: no (class {}: {} and {} merge)",
                m.class,
                name(m.first),
                name(m.second)
            ))
        }
    }
}

fn cmd_reduce_peak(
    h: &ParityCheckMatrix,
    dagger_out: &Option<PathBuf>,
    output: &Option<PathBuf>,
    out: &mut Out<'_>,
) -> Result<()> {
    let t = bcjr(h)?;
    out.line(format!("scp: {}", t.scp()))?;
    let red: PeakReduction = match reduce_peak(h) {
        Ok(r) => r,
        Err(CoreError::NoPeak(_)) => {
            return out
                .line("no peak: the largest state space is not a single run of 1 to 3 classes")
        }
        Err(e) => return Err(e.into()),
    };
    let pat = red.pattern;
    out.line(format!("peak: {} at p={}", pat.kind, pat.p))?;
    let before = t.class_size(pat.p - 1);
    if !pat.guard.holds() {
        let mut why = Vec::new();
        if !pat.guard.threshold_met {
            why.push(format!(
                "|V_{}| = {before} < {}",
                pat.p - 1,
                pat.kind.threshold()
            ));
        }
        if !pat.guard.sides_met {
            why.push(format!(
                "a class away from the peak has at least {before} states"
            ));
        }
        out.line(format!(
            "note: guard fails ({}); result is best effort",
            why.join(", ")
        ))?;
    }
    let Some(att) = &red.attempt else {
        out.line(format!("s_max: {} (no candidate embedding)", red.before))?;
        return out.line("result: not reduced");
    };
    out.line(format!("alpha: {}", att.spec.alpha))?;
    out.line(format!("hyperplane: {}", att.spec.hyperplane))?;
    out.line(format!("recipe: {}", yes(att.structured)))?;
    out.line(format!("candidates tried: {}", red.candidates_tried))?;
    out.line("h_dagger:")?;
    out.matrix(&att.result.h_dagger)?;
    out.line(format!("s_max: {} -> {}", red.before, att.after))?;
    out.line(format!(
        "result: {}",
        if red.success {
            "reduced"
        } else {
            "not reduced"
        }
    ))?;
    if let Some(p) = dagger_out {
        write_file(p, &emit_matrix(&dagger_matrix(h, &att.spec)?))?;
    }
    out.document(output, &att.result.tbt)
}
