// Drives the batch interface in-process: loads the bundled corpus, runs every suite and
// summarizes the report. The same runs are available as `ringoids report corpus/corpus.json`.

use ringoids::cli::{parse_bundle, Ctx, Status, Store, Suite};
use ringoids::tensor::{FlatMethod, SearchOptions};

const CORPUS: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/corpus.json"));
const CORRUPTED: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/corpus/fixtures/corrupted_mu.json"
));

fn summarize(text: &str, suites: &[Suite]) -> ringoids::Result<Vec<(String, Status)>> {
    let store = Store::load(&parse_bundle(text)?.documents)?;
    let mut ctx = Ctx::new(&store, SearchOptions::default(), FlatMethod::All, false);
    for s in suites {
        ctx.run(*s);
    }
    Ok(ctx
        .entries
        .iter()
        .map(|e| (e.id.clone(), e.status))
        .collect())
}

pub fn run_example() -> ringoids::Result<()> {
    let entries = summarize(CORPUS, &[Suite::Validate, Suite::Flat, Suite::Pure])?;
    let count = |st: Status| entries.iter().filter(|(_, s)| *s == st).count();
    println!(
        "corpus: {} checks, {} pass, {} fail",
        entries.len(),
        count(Status::Pass),
        count(Status::Fail)
    );
    assert_eq!(count(Status::Fail), 0);

    let bad = summarize(CORRUPTED, &[Suite::Validate])?;
    for (id, st) in bad.iter().filter(|(_, s)| *s == Status::Fail) {
        println!("corrupted fixture: {id} {st:?}");
    }
    assert!(bad.iter().any(|(_, s)| *s == Status::Fail));

    // the binary entry point with explicit arguments; exit code 1 flags the failure
    let code = ringoids::cli::run([
        "ringoids",
        "validate",
        "--out",
        std::env::temp_dir()
            .join("ringoids-example.json")
            .to_str()
            .unwrap(),
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/corpus/fixtures/corrupted_mu.json"
        ),
    ]);
    println!("ringoids validate corrupted_mu.json exits with {code}");
    assert_eq!(code, ringoids::cli::EXIT_FAIL);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
