//! Flat `key=value` text blocks used by all reports.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_complex::Complex64;

/// Twelve significant digits in scientific notation; negative zero prints as
/// zero.
pub fn sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvBlock {
    entries: Vec<(String, String)>,
}

impl KvBlock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, sci(value))
    }

    pub fn complex(&mut self, key: &str, value: Complex64) -> &mut Self {
        self.real(&format!("{key}_re"), value.re);
        self.real(&format!("{key}_im"), value.im)
    }

    pub fn flag(&mut self, key: &str, ok: bool) -> &mut Self {
        self.text(key, pass_fail(ok))
    }

    pub fn extend(&mut self, other: &KvBlock) -> &mut Self {
        self.entries.extend(other.entries.iter().cloned());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// True when no value equals `FAIL`.
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|(_, v)| v != "FAIL")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_stable() {
        assert_eq!(sci(15.924694960043), "1.59246949600e1");
        assert_eq!(sci(-0.0), "0.00000000000e0");
        let mut kv = KvBlock::new();
        kv.real("a", 1.0).complex("z", Complex64::new(0.5, -2.0)).flag("ok", true);
        assert_eq!(
            kv.render(),
            "a=1.00000000000e0\nz_re=5.00000000000e-1\nz_im=-2.00000000000e0\nok=PASS\n"
        );
        assert!(kv.all_pass());
        kv.flag("bad", false);
        assert!(!kv.all_pass());
        assert_eq!(kv.get("z_im"), Some("-2.00000000000e0"));
    }
}
