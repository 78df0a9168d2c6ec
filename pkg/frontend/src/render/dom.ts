/** Tiny DOM helpers; no framework, no templating. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

export function button(label: string, onClick: () => void, cls = ""): HTMLButtonElement {
  const node = el("button", cls ? { class: cls } : {}, label);
  node.addEventListener("click", onClick);
  return node;
}
