//! Byte sizes with binary suffixes: `512`, `64KiB`, `16MiB`, `1G`.
//! `K`/`KB`/`KiB` all mean 1024; decimal multiples are not supported.

use anyhow::{bail, Context, Result};

pub fn parse_size(text: &str) -> Result<u64> {
    let text = text.trim();
    let split = text
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(text.len());
    let (digits, suffix) = text.split_at(split);
    if digits.is_empty() {
        bail!("size `{text}` must start with a number");
    }
    let value: u64 = digits
        .parse()
        .with_context(|| format!("size `{text}` is out of range"))?;
    let shift = match suffix.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 0,
        "k" | "kb" | "kib" => 10,
        "m" | "mb" | "mib" => 20,
        "g" | "gb" | "gib" => 30,
        other => bail!("unknown size suffix `{other}` in `{text}`"),
    };
    value
        .checked_mul(1 << shift)
        .with_context(|| format!("size `{text}` overflows"))
}

/// Renders a byte count with the largest exact binary unit.
pub fn format_size(bytes: u64) -> String {
    for (shift, unit) in [(30, "GiB"), (20, "MiB"), (10, "KiB")] {
        if bytes >= 1 << shift && bytes.is_multiple_of(1 << shift) {
            return format!("{}{unit}", bytes >> shift);
        }
    }
    format!("{bytes}B")
}
