//! `key=value` config files, spliced into argv ahead of the user's flags.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;
use crate::CliError;

/// Parses a config file body into `(key, value)` pairs in file order.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        pairs.push((key.to_owned(), value.trim().to_owned()));
    }
    Ok(pairs)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut found = None;
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        let Some(s) = arg.to_str() else { continue };
        if s == "--" {
            break;
        }
        if s == "--config" {
            found = iter.next().cloned();
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(v.into());
        }
    }
    found
}

fn long_flags(sub: &clap::Command) -> BTreeSet<String> {
    sub.get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .filter(|l| l != "config" && l != "help")
        .collect()
}

/// Returns `argv` with the config file's settings inserted right after the
/// subcommand name, so later user flags override them. Keys that belong to
/// another subcommand are skipped.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| {
        CliError::Usage(format!(
            "cannot read config {}: {e}",
            Path::new(&path).display()
        ))
    })?;
    let pairs = parse_config(&text)?;

    let cli = Cli::command();
    let all: BTreeSet<String> = cli.get_subcommands().flat_map(long_flags).collect();
    for (key, _) in &pairs {
        if !all.contains(key) {
            return Err(CliError::Usage(format!("unknown config key '{key}'")));
        }
    }

    let Some((pos, sub)) = argv.iter().enumerate().skip(1).find_map(|(i, a)| {
        let name = a.to_str()?;
        cli.find_subcommand(name).map(|s| (i, s))
    }) else {
        return Ok(argv);
    };
    let accepted = long_flags(sub);
    let injected = pairs
        .into_iter()
        .filter(|(k, _)| accepted.contains(k))
        .map(|(k, v)| OsString::from(format!("--{k}={v}")));

    let mut out: Vec<OsString> = argv[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_pairs_and_comments() {
        let pairs = parse_config("# sweep\nsigma = 3\n\nrprime=0.8,0.9\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("sigma".into(), "3".into()),
                ("rprime".into(), "0.8,0.9".into())
            ]
        );
        assert!(parse_config("sigma 3").is_err());
        assert!(parse_config("=3").is_err());
    }

    #[test]
    fn injects_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "sigma=3\nseed=9\nrbar=0.5\n").unwrap();
        let p = path.to_str().unwrap();
        let argv = os(&["regime-lab", "signaling", "--config", p, "--rbar", "0.2"]);
        let out = expand(argv).unwrap();
        assert_eq!(
            out,
            os(&[
                "regime-lab",
                "signaling",
                "--sigma=3",
                "--rbar=0.5",
                "--config",
                p,
                "--rbar",
                "0.2"
            ])
        );
    }

    #[test]
    fn rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cfg");
        std::fs::write(&path, "sigmaa=3\n").unwrap();
        let argv = os(&[
            "regime-lab",
            "signaling",
            "--config",
            path.to_str().unwrap(),
        ]);
        assert!(matches!(expand(argv), Err(CliError::Usage(m)) if m.contains("sigmaa")));
    }

    #[test]
    fn no_config_is_identity() {
        let argv = os(&["regime-lab", "verify"]);
        assert_eq!(expand(argv.clone()).unwrap(), argv);
    }
}
