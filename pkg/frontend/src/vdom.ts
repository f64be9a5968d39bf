/** Minimal virtual nodes: scenes are plain trees, tests inspect them, the
 * browser mounts them. Documents are small, so full re-render is fine. */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: VNode[];
  text?: string;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: VNode[] = [],
  text?: string,
): VNode {
  return { tag, attrs, children, text };
}

export function findAll(root: VNode, tag: string): VNode[] {
  const out: VNode[] = [];
  const walk = (node: VNode) => {
    if (node.tag === tag) out.push(node);
    node.children.forEach(walk);
  };
  walk(root);
  return out;
}

export function textContent(node: VNode): string {
  const own = node.text ?? "";
  return own + node.children.map(textContent).join("");
}

const SVG_NS = "http://www.w3.org/2000/svg";
const SVG_TAGS = new Set([
  "svg", "g", "path", "circle", "rect", "line", "text", "defs",
  "linearGradient", "stop", "title",
]);

export function mount(node: VNode, doc: Document): Element {
  const el = SVG_TAGS.has(node.tag)
    ? doc.createElementNS(SVG_NS, node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  if (node.text !== undefined) {
    el.appendChild(doc.createTextNode(node.text));
  }
  for (const child of node.children) {
    el.appendChild(mount(child, doc));
  }
  return el;
}
