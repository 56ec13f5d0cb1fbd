//! Run manifest: the resolved config as a re-runnable document, with
//! provenance, planned outputs and derived quantities as comments.

use crate::config::Config;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const FILE_NAME: &str = "manifest.cfg";

pub struct Manifest<'a> {
    pub command: &'a str,
    pub config: &'a Config,
    /// Command-line choices that are not config keys (e.g. `methods`).
    pub options: Vec<(String, String)>,
    pub outputs: Vec<String>,
    pub derived: Vec<(String, String)>,
}

impl Manifest<'_> {
    pub fn render(&self, timestamp: u64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# mqs run manifest");
        let _ = writeln!(s, "# tool: mqs {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# timestamp: {timestamp}");
        for (k, v) in &self.options {
            let _ = writeln!(s, "# option {k}: {v}");
        }
        s.push_str(&self.config.echo());
        for o in &self.outputs {
            let _ = writeln!(s, "# output: {o}");
        }
        for (k, v) in &self.derived {
            let _ = writeln!(s, "# derived {k}: {v}");
        }
        s
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let path = dir.join(FILE_NAME);
        std::fs::write(&path, self.render(ts))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_document, CommandKind};

    #[test]
    fn manifest_is_a_valid_config() {
        let cfg = Config::defaults(CommandKind::Simulate);
        let m = Manifest {
            command: "simulate",
            config: &cfg,
            options: vec![("methods".into(), "full,gle".into())],
            outputs: vec!["trajectory_full.csv".into()],
            derived: vec![("omega_sq".into(), "1.95".into())],
        };
        let text = m.render(123);
        assert!(text.contains("# timestamp: 123"));
        let doc = parse_document(&text).unwrap();
        assert_eq!(Config::resolve(CommandKind::Simulate, &doc).unwrap(), cfg);
    }
}
