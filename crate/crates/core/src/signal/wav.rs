use std::io::{Read, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::{SampledSignal, SignalError};

/// On-disk sample encoding for [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavFormat {
    Pcm16,
    #[default]
    Float32,
}

fn map_hound(err: hound::Error) -> SignalError {
    match err {
        hound::Error::IoError(e) => SignalError::Io(e),
        hound::Error::Unsupported => SignalError::UnsupportedCodec("unsupported WAV variant".into()),
        other => SignalError::Malformed(other.to_string()),
    }
}

/// Reads a mono RIFF/WAVE file. PCM16, PCM24, and IEEE float32 are accepted;
/// integer samples are scaled by `2^-(bits-1)`.
pub fn read_wav(path: impl AsRef<Path>) -> Result<SampledSignal, SignalError> {
    let reader = WavReader::open(path).map_err(map_hound)?;
    decode(reader)
}

/// Same as [`read_wav`] over any seekable byte source.
pub fn read_wav_from<R: Read>(source: R) -> Result<SampledSignal, SignalError> {
    let reader = WavReader::new(source).map_err(map_hound)?;
    decode(reader)
}

fn decode<R: Read>(reader: WavReader<R>) -> Result<SampledSignal, SignalError> {
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(SignalError::ChannelCount(spec.channels));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (16 | 24)) => {
            let scale = 1.0 / f64::from(1u32 << (bits - 1));
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) * scale))
                .collect::<Result<_, _>>()
                .map_err(map_hound)?
        }
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(map_hound)?,
        (fmt, bits) => {
            return Err(SignalError::UnsupportedCodec(format!(
                "{fmt:?} with {bits} bits per sample"
            )))
        }
    };
    SampledSignal::new(samples, spec.sample_rate)
}

/// Writes a mono WAV. PCM16 clips to full scale; float32 stores the
/// nearest `f32` of each sample.
pub fn write_wav(
    signal: &SampledSignal,
    path: impl AsRef<Path>,
    format: WavFormat,
) -> Result<(), SignalError> {
    if let Some(i) = signal.first_non_finite() {
        return Err(SignalError::NonFinite(i));
    }
    let writer = WavWriter::create(path, spec_for(signal, format)).map_err(map_hound)?;
    encode(signal, writer, format)
}

/// Same as [`write_wav`] into an in-memory or other seekable sink.
pub fn write_wav_to<W: Write + Seek>(
    signal: &SampledSignal,
    sink: W,
    format: WavFormat,
) -> Result<(), SignalError> {
    if let Some(i) = signal.first_non_finite() {
        return Err(SignalError::NonFinite(i));
    }
    let writer = WavWriter::new(sink, spec_for(signal, format)).map_err(map_hound)?;
    encode(signal, writer, format)
}

fn spec_for(signal: &SampledSignal, format: WavFormat) -> WavSpec {
    let (bits_per_sample, sample_format) = match format {
        WavFormat::Pcm16 => (16, SampleFormat::Int),
        WavFormat::Float32 => (32, SampleFormat::Float),
    };
    WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate_hz(),
        bits_per_sample,
        sample_format,
    }
}

fn encode<W: Write + Seek>(
    signal: &SampledSignal,
    mut writer: WavWriter<W>,
    format: WavFormat,
) -> Result<(), SignalError> {
    match format {
        WavFormat::Pcm16 => {
            for &x in signal.samples() {
                let q = (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                writer.write_sample(q).map_err(map_hound)?;
            }
        }
        WavFormat::Float32 => {
            for &x in signal.samples() {
                writer.write_sample(x as f32).map_err(map_hound)?;
            }
        }
    }
    writer.finalize().map_err(map_hound)
}
