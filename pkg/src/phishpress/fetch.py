"""Fetching raw page bodies over HTTP(S).

Pages are retrieved as opaque byte streams: no script execution, no
rendering, at most five redirects. This is the safe-inspection path for
collecting suspect pages.
"""

from __future__ import annotations

import hashlib
import logging
from datetime import datetime, timezone

import requests

from .corpus import Label, Source, WebDocument
from .errors import EmptyBody, HttpError, NetworkError

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0
DEFAULT_USER_AGENT = "phishpress/0.1 (+corpus-collector)"
MAX_REDIRECTS = 5


def fetch_url(
    url: str,
    timeout: float = DEFAULT_TIMEOUT,
    user_agent: str = DEFAULT_USER_AGENT,
    doc_id: str | None = None,
) -> WebDocument:
    """Fetch one URL and return it as an unlabeled WebDocument.

    Raises NetworkError on timeout/DNS/connection/redirect-loop failures,
    HttpError on a non-2xx final status, EmptyBody on a zero-byte body.
    """
    session = requests.Session()
    session.max_redirects = MAX_REDIRECTS
    try:
        response = session.get(
            url,
            timeout=timeout,
            headers={"User-Agent": user_agent},
            allow_redirects=True,
        )
    except (requests.Timeout, requests.ConnectionError, requests.TooManyRedirects) as exc:
        raise NetworkError(f"{url}: {exc}") from exc
    except requests.RequestException as exc:
        raise NetworkError(f"{url}: {exc}") from exc
    finally:
        session.close()

    if not 200 <= response.status_code < 300:
        raise HttpError(response.status_code, url)
    body = response.content
    if len(body) == 0:
        raise EmptyBody(url)
    logger.debug("fetched %s: %d bytes", url, len(body))

    return WebDocument(
        id=doc_id or "fetch-" + hashlib.sha256(url.encode("utf-8")).hexdigest()[:12],
        url=url,
        label=Label.UNKNOWN,
        html=body,
        fetched_at=datetime.now(timezone.utc),
        source=Source.FETCHED,
    )
