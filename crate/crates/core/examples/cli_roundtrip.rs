//! build -> eval -> verify through the command-line front end.

use periodic_nls::cli::run;

fn main() {
    let dir = std::env::temp_dir().join(format!("periodic-nls-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let desc = dir.join("d.json");
    let csv = dir.join("u.csv");
    let d = desc.to_str().unwrap();
    let code = run(["periodic-nls", "build", "--alpha", "0.5", "--omega", "2", "--c-re", "-0.75", "-o", d]);
    println!("build exit {code}");
    let code = run(["periodic-nls", "eval", "--descriptor", d, "--format", "csv", "-o", csv.to_str().unwrap()]);
    let lines = std::fs::read_to_string(&csv).map(|s| s.lines().count()).unwrap_or(0);
    println!("eval exit {code}, {lines} CSV lines");
    let code = run(["periodic-nls", "verify", "--descriptor", d, "--alpha", "0.5", "--omega", "2", "--c-re", "-0.75", "--nx", "11", "--nt", "9", "-o", dir.join("r.json").to_str().unwrap()]);
    println!("verify exit {code}");
    let _ = std::fs::remove_dir_all(&dir);
}
