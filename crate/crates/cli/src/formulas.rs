use anyhow::Result;
use codedtn::coding::candidate_schemes;
use codedtn::{plan_best, SlicingPlan};

/// One line per (f, scheme) with workers and gain over replication; the
/// planner's choice is starred.
pub fn print(plan: &SlicingPlan, (lo, hi): (u64, u64), csv: bool) -> Result<()> {
    let schemes = candidate_schemes(plan);
    if csv {
        println!("f,scheme,workers,gain,best");
    } else {
        println!("plan {plan} ({} partitions)", plan.partitions()?);
        println!("{:>4}  {:<13} {:>12} {:>12}", "f", "scheme", "workers", "gain");
    }
    for f in lo..=hi {
        let best = plan_best(plan, f)?.kind();
        for s in &schemes {
            let workers = s.f_resilient(f)?;
            let gain = s.gain(f)?;
            let star = if s.kind() == best { "*" } else { "" };
            if csv {
                println!("{f},{},{workers},{gain},{star}", s.kind());
            } else {
                let line = format!("{f:>4}  {:<13} {workers:>12} {gain:>12} {star}", s.kind().name());
                println!("{}", line.trim_end());
            }
        }
    }
    Ok(())
}
