//! Pulling a rule expression out of free-form model output.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Extract the rule expression from a model response.
///
/// If the response contains a fenced code block the contents of the first
/// block win; comment lines starting with `#` and blank lines inside the
/// block are dropped and the remaining lines joined with spaces, so a rule
/// may be split across lines. Without a fence, the last non-empty line of
/// the response is taken verbatim. Either way the result is trimmed; an
/// empty response yields an empty string, which then fails rule parsing
/// with a clear diagnostic rather than being special-cased here.
pub fn extract_rule(response: &str) -> String {
    if let Some(block) = first_fenced_block(response) {
        let parts: Vec<&str> = block
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .collect();
        return parts.join(" ").trim().to_string();
    }
    response
        .lines()
        .rev()
        .map(str::trim)
        .find(|line| !line.is_empty())
        .unwrap_or("")
        .to_string()
}

/// The contents of the first ``` fence, language tag on the opening line
/// ignored. An unclosed fence runs to the end of the response.
fn first_fenced_block(response: &str) -> Option<String> {
    let mut inside = false;
    let mut collected: Vec<&str> = Vec::new();
    for line in response.lines() {
        if line.trim_start().starts_with("```") {
            if inside {
                return Some(collected.join("\n"));
            }
            inside = true;
            continue;
        }
        if inside {
            collected.push(line);
        }
    }
    if inside {
        Some(collected.join("\n"))
    } else {
        None
    }
}
