//! Writers for the fixed-layout JSON documents.
//!
//! Objects are written as `{"key": value, "key": value}`; arrays of numbers and
//! of pairs are compact (`[[1,2],[1,3]]`). Readers go through serde and accept
//! any whitespace.

use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) struct ObjectWriter {
    buf: String,
}

impl ObjectWriter {
    pub(crate) fn new(format: &str) -> Self {
        let mut w = ObjectWriter {
            buf: String::from("{"),
        };
        w.raw("format", &quote(format));
        w
    }

    pub(crate) fn raw(&mut self, key: &str, value: &str) -> &mut Self {
        if self.buf.len() > 1 {
            self.buf.push_str(", ");
        }
        self.buf.push_str(&quote(key));
        self.buf.push_str(": ");
        self.buf.push_str(value);
        self
    }

    /// Compact serde rendering of `value`.
    pub(crate) fn value<T: Serialize + ?Sized>(&mut self, key: &str, value: &T) -> &mut Self {
        let rendered = serde_json::to_string(value).expect("plain data always serializes");
        self.raw(key, &rendered)
    }

    pub(crate) fn finish(&mut self) -> String {
        let mut out = std::mem::take(&mut self.buf);
        out.push('}');
        out
    }
}

pub(crate) fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub(crate) fn check_format(expected: &'static str, found: &str) -> Result<()> {
    if found != expected {
        return Err(Error::FormatTag {
            expected,
            found: found.to_owned(),
        });
    }
    Ok(())
}
