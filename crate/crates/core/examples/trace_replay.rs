//! Writing a trace to disk, reading it back, replaying it, and catching an
//! edited position.

use maxline::sim::{verify_trace, Check};
use maxline::{simulate, AlgorithmId, Error, InitialSource, RunConfig, SchedulerSpec, Trace};

fn main() -> maxline::Result<()> {
    let mut cfg = RunConfig::new(
        AlgorithmId::MaxlineLumiSsync,
        SchedulerSpec::ssync_roundrobin(2),
        InitialSource::Random { n: 6, seed: 4 },
    );
    let path = std::env::temp_dir().join("maxline-trace-replay.jsonl");
    cfg.trace = Some(path.clone());
    let trace = simulate(&cfg)?;
    println!("wrote {} records to {}", trace.records.len(), path.display());

    let loaded = Trace::load(&path)?;
    println!("reloaded byte-identical: {}", loaded.to_jsonl() == trace.to_jsonl());
    let report = verify_trace(&loaded, &[Check::Safety])?;
    println!("replay and safety: {} violations", report.violations.len());

    let mut tampered = loaded.clone();
    tampered.records[0].positions[0][0] += 1e-6;
    match verify_trace(&tampered, &[]) {
        Err(Error::ReplayMismatch(round)) => println!("edited trace rejected at round {round}"),
        other => println!("unexpected: {other:?}"),
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
