//! Little-endian binary primitives shared by the on-disk stores.
//!
//! Every binary store starts with an 8-byte magic followed by a `u32` format
//! version. Optional values are written as a presence byte followed by the
//! value when present; strings are a `u32` byte length followed by UTF-8.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

pub(crate) struct Encoder<W: Write> {
    inner: W,
}

impl<W: Write> Encoder<W> {
    pub fn new(inner: W) -> Self {
        Encoder { inner }
    }

    pub fn header(&mut self, magic: &[u8; 8], version: u32) -> std::io::Result<()> {
        self.inner.write_all(magic)?;
        self.u32(version)
    }

    pub fn u8(&mut self, v: u8) -> std::io::Result<()> {
        self.inner.write_u8(v)
    }

    pub fn u32(&mut self, v: u32) -> std::io::Result<()> {
        self.inner.write_u32::<LE>(v)
    }

    pub fn u64(&mut self, v: u64) -> std::io::Result<()> {
        self.inner.write_u64::<LE>(v)
    }

    pub fn i64(&mut self, v: i64) -> std::io::Result<()> {
        self.inner.write_i64::<LE>(v)
    }

    pub fn f64(&mut self, v: f64) -> std::io::Result<()> {
        self.inner.write_f64::<LE>(v)
    }

    pub fn str(&mut self, s: &str) -> std::io::Result<()> {
        self.u32(s.len() as u32)?;
        self.inner.write_all(s.as_bytes())
    }

    pub fn opt_str(&mut self, s: Option<&str>) -> std::io::Result<()> {
        match s {
            Some(s) => {
                self.u8(1)?;
                self.str(s)
            }
            None => self.u8(0),
        }
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub(crate) struct Decoder<R: Read> {
    inner: R,
    kind: &'static str,
}

impl<R: Read> Decoder<R> {
    pub fn new(inner: R, kind: &'static str) -> Self {
        Decoder { inner, kind }
    }

    fn wrap<T>(&self, r: std::io::Result<T>) -> Result<T> {
        r.map_err(|e| Error::format(self.kind, format!("truncated or unreadable: {e}")))
    }

    /// Reads and checks the magic; returns the version.
    pub fn header(&mut self, magic: &[u8; 8], supported: u32) -> Result<u32> {
        let mut buf = [0u8; 8];
        let r = self.inner.read_exact(&mut buf);
        self.wrap(r)?;
        if &buf != magic {
            return Err(Error::format(self.kind, "bad magic"));
        }
        let version = self.u32()?;
        if version != supported {
            return Err(Error::format(
                self.kind,
                format!("unsupported version {version} (expected {supported})"),
            ));
        }
        Ok(version)
    }

    pub fn u8(&mut self) -> Result<u8> {
        let r = self.inner.read_u8();
        self.wrap(r)
    }

    pub fn u32(&mut self) -> Result<u32> {
        let r = self.inner.read_u32::<LE>();
        self.wrap(r)
    }

    pub fn u64(&mut self) -> Result<u64> {
        let r = self.inner.read_u64::<LE>();
        self.wrap(r)
    }

    pub fn i64(&mut self) -> Result<i64> {
        let r = self.inner.read_i64::<LE>();
        self.wrap(r)
    }

    pub fn f64(&mut self) -> Result<f64> {
        let r = self.inner.read_f64::<LE>();
        self.wrap(r)
    }

    pub fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let mut buf = vec![0u8; len];
        let r = self.inner.read_exact(&mut buf);
        self.wrap(r)?;
        String::from_utf8(buf).map_err(|_| Error::format(self.kind, "invalid UTF-8 string"))
    }

    pub fn opt_str(&mut self) -> Result<Option<String>> {
        match self.u8()? {
            0 => Ok(None),
            1 => self.str().map(Some),
            b => Err(Error::format(self.kind, format!("bad presence byte {b}"))),
        }
    }
}

pub(crate) fn create(path: &Path) -> Result<Encoder<BufWriter<File>>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(Encoder::new(BufWriter::new(f)))
}

pub(crate) fn open(path: &Path, kind: &'static str) -> Result<Decoder<BufReader<File>>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(Decoder::new(BufReader::new(f), kind))
}
