// Unified diff rendering with syntax-neutral line highlighting.

const ESCAPES: Record<string, string> = {
  '&': '&amp;',
  '<': '&lt;',
  '>': '&gt;',
  '"': '&quot;',
  "'": '&#39;',
}

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch])
}

function lineClass(line: string): string {
  if (line.startsWith('@@')) return 'diff-hunk'
  if (line.startsWith('+++') || line.startsWith('---')) return 'diff-file'
  if (line.startsWith('diff ') || line.startsWith('index ')) return 'diff-meta'
  if (line.startsWith('+')) return 'diff-add'
  if (line.startsWith('-')) return 'diff-del'
  return 'diff-ctx'
}

/** Render a unified diff as an HTML string of classed line elements. */
export function renderUnifiedDiff(diff: string): string {
  if (!diff.trim()) return '<div class="diff-empty">(no diff available)</div>'
  const rows = diff
    .replace(/\n$/, '')
    .split('\n')
    .map((line) => `<div class="${lineClass(line)}">${escapeHtml(line) || '&nbsp;'}</div>`)
  return `<div class="diff">${rows.join('')}</div>`
}
