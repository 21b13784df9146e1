/**
 * Trigger listener: consumes the wire byte stream from a socket, a
 * serial device path or standard input, invokes a callback per beat
 * trigger in order, tracks sequence gaps and reports latency
 * percentiles at the end of the session.
 *
 * Latency semantics: sender timestamps are session-relative, so true
 * transport latency is only measurable on a loopback host. What is
 * reported is relative latency -- how much later than the first
 * trigger each one arrived compared to its sender spacing -- which on
 * one host equals transport jitter/drift. Across hosts treat it as
 * inter-arrival jitter only.
 */

import { createConnection } from 'node:net';
import { createReadStream } from 'node:fs';
import type { Readable } from 'node:stream';
import { performance } from 'node:perf_hooks';

import { StreamDecoder, type WireEvent } from './wire.js';

export interface ReceivedTrigger {
  seq: number;
  sender_timestamp_ms: number;
  recv_monotonic_ms: number;
  /** relative latency vs the first trigger; comparable clocks only */
  transport_latency_ms: number | null;
}

export interface LatencyStats {
  p50_ms: number;
  p95_ms: number;
  max_ms: number;
}

export interface SessionReport {
  received: number;
  gaps: number;
  malformed: number;
  samples: number;
  infos: number;
  latency: LatencyStats | null;
  endpoint_closed: boolean;
}

export interface ListenOptions {
  onTrigger?: (t: ReceivedTrigger) => void;
  onEvent?: (e: WireEvent) => void;
  /** JSON-lines sink; one line per trigger plus a final summary line */
  report?: (line: string) => void;
  /** sender clock comparable with the local one (same host) */
  loopback?: boolean;
}

function percentile(sorted: number[], q: number): number {
  if (sorted.length === 1) return sorted[0];
  const pos = q * (sorted.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, sorted.length - 1);
  return sorted[lo] * (1 - (pos - lo)) + sorted[hi] * (pos - lo);
}

export function openEndpoint(endpoint: string): Readable {
  if (endpoint === 'stdin' || endpoint === '-') return process.stdin;
  if (endpoint.startsWith('tcp:')) {
    const [host, port] = endpoint.slice(4).split(':');
    return createConnection({ host, port: Number(port) });
  }
  return createReadStream(endpoint);
}

/** Consume a wire stream until it ends; resolves to the session report. */
export function listen(
  source: Readable | string,
  options: ListenOptions = {},
): Promise<SessionReport> {
  const stream = typeof source === 'string' ? openEndpoint(source) : source;
  const decoder = new StreamDecoder();
  const report: SessionReport = {
    received: 0,
    gaps: 0,
    malformed: 0,
    samples: 0,
    infos: 0,
    latency: null,
    endpoint_closed: false,
  };
  let expectedSeq = 0;
  let firstSender: number | null = null;
  let firstRecv: number | null = null;
  const latencies: number[] = [];

  const handle = (events: WireEvent[]) => {
    for (const event of events) {
      options.onEvent?.(event);
      if (event.type === 'error') {
        report.malformed += 1;
        continue;
      }
      if (event.type === 'sample') {
        report.samples += 1;
        continue;
      }
      if (event.type === 'info') {
        report.infos += 1;
        continue;
      }
      const now = performance.now();
      if (event.seq !== expectedSeq) {
        report.gaps += 1;
        options.report?.(JSON.stringify({
          type: 'gap_warning',
          expected_seq: expectedSeq,
          got_seq: event.seq,
        }));
      }
      expectedSeq = event.seq + 1;
      if (firstSender === null || firstRecv === null) {
        firstSender = event.timestamp_ms;
        firstRecv = now;
      }
      const latency = options.loopback
        ? (now - firstRecv) - (event.timestamp_ms - firstSender)
        : null;
      if (latency !== null) latencies.push(latency);
      const received: ReceivedTrigger = {
        seq: event.seq,
        sender_timestamp_ms: event.timestamp_ms,
        recv_monotonic_ms: now,
        transport_latency_ms: latency,
      };
      report.received += 1;
      options.onTrigger?.(received);
      options.report?.(JSON.stringify({ type: 'trigger', ...received }));
    }
  };

  return new Promise((resolve, reject) => {
    stream.on('data', (chunk: Buffer) => handle(decoder.feed(chunk)));
    stream.on('error', (err) => {
      if (report.received || report.samples || report.malformed) {
        // partial stats are still worth emitting
        report.endpoint_closed = true;
        finish();
      } else {
        reject(err);
      }
    });
    stream.on('end', finish);
    stream.on('close', finish);

    let done = false;
    function finish() {
      if (done) return;
      done = true;
      handle(decoder.end());
      if (latencies.length) {
        const sorted = [...latencies].sort((a, b) => a - b);
        report.latency = {
          p50_ms: percentile(sorted, 0.5),
          p95_ms: percentile(sorted, 0.95),
          max_ms: sorted[sorted.length - 1],
        };
      }
      options.report?.(JSON.stringify({ type: 'summary', ...report }));
      resolve(report);
    }
  });
}
