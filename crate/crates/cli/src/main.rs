//! `rrank`: command-line front end.
//!
//! Exit codes: 0 success, 1 verification or certificate failure, 2 malformed
//! input, 3 budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use rrank::bounds::{guaranteed_exponent, lb_certificate};
use rrank::fragment::{fragment, fragment_bound};
use rrank::json::{
    decomposition_from_json, decomposition_to_json, family_from_json, family_to_json, from_str, parse_field_arg,
    partition_from_json, partition_to_json, tensor_from_json, tensor_to_json, to_string, trace_to_json,
    DecompositionJson, TensorJson,
};
use rrank::meetrank::multi_meet;
use rrank::oracle::{exact_rank, Budget, RankResult};
use rrank::sample::{planted_decomposition, rng};
use rrank::tensor::delta_partition;
use rrank::{Decomposition, Error, Partition, PartitionFamily, Shape, Subset, Tensor};

#[derive(Parser)]
#[command(name = "rrank", version, about = "Exact partition-indexed tensor ranks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Raise the oracle's entry budget (default 16).
    #[arg(long)]
    budget_entries: Option<usize>,
    /// Raise the oracle's search depth budget (default 4).
    #[arg(long)]
    budget_k: Option<usize>,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        let d = Budget::default();
        if self.budget_entries.is_none() && self.budget_k.is_none() {
            return d;
        }
        Budget::with_cost(self.budget_entries.unwrap_or(d.max_entries), self.budget_k.unwrap_or(d.max_k))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Whether the first partition (or family) refines the second.
    Finer { first: PathBuf, second: PathBuf },
    /// Meet of partitions or families.
    Meet {
        #[arg(required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
    },
    /// Diagonal tensor of a partition.
    Delta {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        n: usize,
        /// A prime or `Q`.
        #[arg(long)]
        field: String,
    },
    /// Fragment two decompositions of one tensor at `J_max` (or `--split-at`).
    Fragment {
        #[arg(long)]
        dec1: PathBuf,
        #[arg(long)]
        dec2: PathBuf,
        /// Comma-separated 1-based coordinates.
        #[arg(long)]
        split_at: Option<String>,
    },
    /// Combine decompositions over several families into one over their meet.
    Combine {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        decs: Vec<PathBuf>,
    },
    /// Lower-bound certificate for the rank of a diagonal tensor.
    CertifyLb {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        eval_at: Option<u128>,
    },
    /// Exact rank by exhaustive search.
    Rank {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Whether a decomposition evaluates to a tensor.
    Verify {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        dec: PathBuf,
    },
    /// Random decomposition over a family, printed with its tensor.
    RandomDec {
        #[arg(long)]
        family: PathBuf,
        /// Comma-separated dimensions.
        #[arg(long)]
        shape: String,
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 2)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Budget(_) | Error::EntryLimit { .. } | Error::EnumerationLimit(_) => 3,
            Error::EvaluationMismatch | Error::InvariantBreach(_) | Error::NotFiner => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, message: format!("cannot read {}: {e}", path.display()) })
}

enum PartitionOrFamily {
    Partition(Partition),
    Family(PartitionFamily),
}

impl PartitionOrFamily {
    fn family(self) -> PartitionFamily {
        match self {
            PartitionOrFamily::Partition(p) => PartitionFamily::single(p),
            PartitionOrFamily::Family(f) => f,
        }
    }
}

fn read_partition_or_family(path: &Path) -> Result<PartitionOrFamily, Failure> {
    let text = read(path)?;
    if let Ok(p) = from_str::<Vec<Vec<usize>>>(&text) {
        return Ok(PartitionOrFamily::Partition(partition_from_json(&p)?));
    }
    let f = from_str::<Vec<Vec<Vec<usize>>>>(&text)?;
    Ok(PartitionOrFamily::Family(family_from_json(&f)?))
}

fn read_partition(path: &Path) -> Result<Partition, Failure> {
    match read_partition_or_family(path)? {
        PartitionOrFamily::Partition(p) => Ok(p),
        PartitionOrFamily::Family(_) => Err(Failure { code: 2, message: format!("{} is a family, not a partition", path.display()) }),
    }
}

fn read_family(path: &Path) -> Result<PartitionFamily, Failure> {
    read_partition_or_family(path).map(PartitionOrFamily::family)
}

fn read_tensor(path: &Path) -> Result<Tensor, Failure> {
    Ok(tensor_from_json(&from_str::<TensorJson>(&read(path)?)?)?)
}

fn read_dec(path: &Path) -> Result<Decomposition, Failure> {
    Ok(decomposition_from_json(&from_str::<DecompositionJson>(&read(path)?)?)?)
}

fn print(v: &impl serde::Serialize) {
    println!("{}", to_string(v));
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure { code: 2, message: format!("{what} must be comma-separated integers, got {s:?}") })
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Finer { first, second } => {
            let a = read_partition_or_family(&first)?;
            let b = read_partition_or_family(&second)?;
            let answer = match (a, b) {
                (PartitionOrFamily::Partition(p), PartitionOrFamily::Partition(q)) => p.is_finer_than(&q)?,
                (a, b) => a.family().is_finer_than(&b.family())?,
            };
            println!("{answer}");
        }
        Command::Meet { inputs } => {
            let items = inputs.iter().map(|p| read_partition_or_family(p)).collect::<Result<Vec<_>, _>>()?;
            let all_partitions = items.iter().all(|x| matches!(x, PartitionOrFamily::Partition(_)));
            let mut it = items.into_iter().map(PartitionOrFamily::family);
            let first = it.next().expect("clap requires one input");
            let m = it.try_fold(first, |acc, f| acc.meet(&f))?;
            if all_partitions {
                print(&partition_to_json(&m.members()[0]));
            } else {
                print(&family_to_json(&m));
            }
        }
        Command::Delta { partition, n, field } => {
            let p = read_partition(&partition)?;
            let field = parse_field_arg(&field)?;
            print(&tensor_to_json(&delta_partition(&p, n, field)?)?);
        }
        Command::Fragment { dec1, dec2, split_at } => {
            let d1 = read_dec(&dec1)?;
            let d2 = read_dec(&dec2)?;
            if d1.evaluate() != d2.evaluate() {
                return Err(Failure { code: 1, message: "the two decompositions evaluate to different tensors".into() });
            }
            let j = match split_at {
                Some(s) => Subset::from_one_based(&parse_list(&s, "--split-at")?)?,
                None => d1.family().union(d2.family())?.j_max(),
            };
            let sf1 = d1.split_at(j)?.reduce_independent()?;
            let sf2 = d2.split_at(j)?.reduce_independent()?;
            let out = fragment(&sf1, &sf2, d1.family(), d2.family())?;
            let bound = fragment_bound(sf1.len(), sf2.len());
            eprintln!(
                "fragment at J={j}: k1={} k2={} length {} <= bound {bound}",
                sf1.len(),
                sf2.len(),
                out.len()
            );
            print(&decomposition_to_json(&out)?);
        }
        Command::Combine { tensor, decs } => {
            let t = read_tensor(&tensor)?;
            let decs = decs.iter().map(|p| read_dec(p)).collect::<Result<Vec<_>, _>>()?;
            let (out, traces) = multi_meet(&t, &decs)?;
            let v: Value = json!({
                "decomposition": decomposition_to_json(&out)?,
                "traces": traces.iter().map(trace_to_json).collect::<Vec<_>>(),
            });
            print(&v);
        }
        Command::CertifyLb { partition, family, eval_at } => {
            let p = read_partition(&partition)?;
            let r = read_family(&family)?;
            let (f, e) = match lb_certificate(&p, &r).and_then(|f| Ok((f, guaranteed_exponent(&p, &r)?))) {
                Ok(x) => x,
                Err(Error::Precondition(m)) => return Err(Failure { code: 1, message: m }),
                Err(e) => return Err(e.into()),
            };
            let mut v = json!({
                "bound": f,
                "exponent": e.achieved.to_string(),
                "exponent_floor": e.floor.to_string(),
            });
            if let Some(n) = eval_at {
                v["eval"] = json!({ "n": n, "value": f.eval(n) });
            }
            eprint!("{}", f.sketch());
            print(&v);
        }
        Command::Rank { tensor, family, max_k, budget } => {
            let t = read_tensor(&tensor)?;
            let r = read_family(&family)?;
            match exact_rank(&t, &r, max_k, &budget.budget())? {
                RankResult::Exact(k) => println!("{k}"),
                RankResult::Exceeds(_) => println!("exceeds"),
            }
        }
        Command::Verify { tensor, dec } => {
            let t = read_tensor(&tensor)?;
            let d = read_dec(&dec)?;
            let ok = d.verify(&t);
            println!("{ok}");
            if !ok {
                return Err(Failure { code: 1, message: "decomposition does not evaluate to the tensor".into() });
            }
        }
        Command::RandomDec { family, shape, field, len, seed } => {
            let r = read_family(&family)?;
            let field = parse_field_arg(&field)?;
            let shape = Shape::new(&parse_list(&shape, "--shape")?)?;
            if shape.axes() != r.ground() {
                return Err(Error::GroundMismatch(r.ground(), shape.axes()).into());
            }
            let d = planted_decomposition(&r, &shape, field, len, &mut rng(seed));
            print(&json!({
                "tensor": tensor_to_json(&d.evaluate())?,
                "decomposition": decomposition_to_json(&d)?,
            }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rrank: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
