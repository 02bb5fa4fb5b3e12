// Drives the command line in-process: construct a family, then verify the emitted JSON.
use subspace_forge::cli::{run_with, strip_manifest};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(
        std::iter::once("subspace-forge").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap(),
    )
}

fn main() {
    let dir = std::env::temp_dir().join(format!("subspace-forge-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("family.json");
    let file = path.to_str().unwrap();

    let (code, _) = run(&[
        "construct",
        "random",
        "--n",
        "5",
        "--k",
        "1",
        "--L",
        "7",
        "--q",
        "5",
        "--seed",
        "1",
        "-o",
        file,
    ]);
    println!("construct random: exit {code}");
    let first: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();

    let (code, out) = run(&[
        "verify",
        file,
        "--properties",
        "spread,aad,as,thm1,relations",
    ]);
    println!("verify: exit {code}\n{out}");

    let (_, again) = run(&[
        "construct",
        "random",
        "--n",
        "5",
        "--k",
        "1",
        "--L",
        "7",
        "--q",
        "5",
        "--seed",
        "1",
    ]);
    let second: serde_json::Value = serde_json::from_str(&again).unwrap();
    println!(
        "same seed, same payload: {}",
        strip_manifest(&first) == strip_manifest(&second)
    );

    let (code, out) = run(&["construct", "rs", "--n", "3", "--k", "1", "--q", "2"]);
    println!("construct rs with q=2: exit {code}, {}", out.trim());

    let (code, out) = run(&[
        "--pretty", "bounds", "--n", "5", "--k", "2", "--L", "1,31", "--q", "11,13",
    ]);
    println!("bounds: exit {code}\n{out}");
    std::fs::remove_dir_all(&dir).ok();
}
