//! Regenerates the bundled instance files under `instances/` from the
//! built-in corpus, so the JSON on disk always matches the schema the loader
//! expects. Run from the workspace root:
//!
//! ```text
//! cargo run -p adasub --example write_instances
//! ```

use adasub::corpus;

fn main() -> adasub::Result<()> {
    let dir = std::path::Path::new("instances");
    std::fs::create_dir_all(dir).expect("create instances/");
    for inst in [
        corpus::two_item_coverage(),
        corpus::three_hypotheses(),
        corpus::cascade_path(),
        corpus::correlated_surge(),
    ] {
        let path = dir.join(format!("{}.json", inst.name));
        inst.save(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
